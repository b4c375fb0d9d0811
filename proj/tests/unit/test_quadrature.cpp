#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rydberg/error.hpp"
#include "rydberg/quadrature.hpp"

using namespace rydberg;

TEST_CASE("smooth integrals") {
  const QuadratureRule rule{1e-14, 1e-13};
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, rule).value ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 50.0, rule, 4).value ==
        doctest::Approx(1.0 - std::exp(-50.0)).epsilon(1e-13));
  // Degree <= 22 is integrated exactly by a single Kronrod panel.
  const auto r = integrate([](double x) { return std::pow(x, 10); }, -1.0, 1.0, rule);
  CHECK(r.value == doctest::Approx(2.0 / 11).epsilon(1e-15));
  CHECK(r.panels == 1);
}

TEST_CASE("adaptive subdivision handles a sharp peak") {
  const QuadratureRule rule{1e-12, 1e-12};
  const double w = 1e-2;
  const auto r = integrate([&](double x) { return std::exp(-0.5 * (x - 0.37) * (x - 0.37) / (w * w)); },
                           0.0, 1.0, rule, 4);
  CHECK(r.value == doctest::Approx(w * std::sqrt(2 * std::numbers::pi)).epsilon(1e-10));
  CHECK(r.panels > 4);
}

TEST_CASE("batch integration shares panels") {
  const BatchIntegrand f = [](double x, std::span<double> out) {
    out[0] = std::cos(x);
    out[1] = 1e6 * x * x;
    out[2] = 1e-6 * std::exp(x);
  };
  const double bp[] = {0.0, 1.0};
  const double tols[] = {1e-14, 1e-8, 1e-20};
  const auto r = integrate_batch(f, 3, bp, QuadratureRule{1e-14, 1e-14}, tols);
  REQUIRE(r.size() == 3);
  CHECK(r[0].value == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
  CHECK(r[1].value == doctest::Approx(1e6 / 3).epsilon(1e-14));
  CHECK(r[2].value == doctest::Approx(1e-6 * (std::exp(1.0) - 1.0)).epsilon(1e-13));
}

TEST_CASE("tightening the tolerance stays within the reported error") {
  auto f = [](double x) { return std::sin(30 * x) * std::exp(-x); };
  const auto coarse = integrate(f, 0.0, 10.0, QuadratureRule{1e-8, 1e-8});
  const auto fine = integrate(f, 0.0, 10.0, QuadratureRule{5e-9, 5e-9});
  CHECK(std::abs(coarse.value - fine.value) <= 1e-8);
  const double exact = 30.0 / (1.0 + 900.0) * (1.0 - std::exp(-10.0) * (std::cos(300.0) + std::sin(300.0) / 30.0));
  CHECK(std::abs(fine.value - exact) < 5e-9);
}

TEST_CASE("failure to converge is reported") {
  QuadratureRule rule{1e-15, 1e-15};
  rule.max_panels = 20;
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, rule),
                  NumericalError);
}

TEST_CASE("bad breakpoints are rejected") {
  const double one[] = {0.0};
  const double backwards[] = {1.0, 0.0};
  auto f = [](double x) { return x; };
  CHECK_THROWS_AS(integrate(f, one, QuadratureRule{}), std::invalid_argument);
  CHECK_THROWS_AS(integrate(f, backwards, QuadratureRule{}), std::invalid_argument);
}

TEST_CASE("uniform breakpoints") {
  const auto bp = uniform_breakpoints(0.0, 2.0, 4);
  REQUIRE(bp.size() == 5);
  CHECK(bp.front() == 0.0);
  CHECK(bp[2] == 1.0);
  CHECK(bp.back() == 2.0);
}
