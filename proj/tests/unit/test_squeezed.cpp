#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rydberg/error.hpp"
#include "rydberg/squeezed.hpp"

using namespace rydberg;

namespace {

// Independent moment oracle: Gauss-Kronrod over fixed panels with a 5-point
// stencil for d psi / dr.
struct Oracle {
  double norm, r, r2, inv_r, inv_r2, p, p2, h_kin;
};

Oracle quadrature_moments(const RadialSqueezedState& s, int l = 1) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double mean = (2 * s.alpha() + 3) / (2 * s.gamma0());
  const double spread = std::sqrt(2 * s.alpha() + 3) / (2 * s.gamma0());
  const double h = 1e-4 / s.gamma0();
  const double a = 4 * h;
  const double b = mean + 60 * spread;
  auto dpsi = [&](double r) {
    return (-s(r + 2 * h) + 8.0 * s(r + h) - 8.0 * s(r - h) + s(r - 2 * h)) / (12 * h);
  };
  auto integrate = [&](auto f) {
    double sum = 0.0;
    const int panels = 64;
    for (int i = 0; i < panels; ++i) {
      const double lo = a + (b - a) * i / panels;
      const double hi = a + (b - a) * (i + 1) / panels;
      sum += GK::integrate(f, lo, hi, 6, 1e-11);
    }
    return sum;
  };
  Oracle o{};
  o.norm = integrate([&](double r) { return std::norm(s(r)) * r * r; });
  o.r = integrate([&](double r) { return std::norm(s(r)) * r * r * r; });
  o.r2 = integrate([&](double r) { return std::norm(s(r)) * r * r * r * r; });
  o.inv_r = integrate([&](double r) { return std::norm(s(r)) * r; });
  o.inv_r2 = integrate([&](double r) { return std::norm(s(r)); });
  // p_r psi = -i (psi' + psi / r)
  o.p = integrate([&](double r) {
    const auto v = std::complex<double>(0.0, -1.0) * (dpsi(r) + s(r) / r);
    return (std::conj(s(r)) * v).real() * r * r;
  });
  o.p2 = integrate([&](double r) { return std::norm(dpsi(r) + s(r) / r) * r * r; });
  o.h_kin = 0.5 * o.p2 + 0.5 * l * (l + 1) * o.inv_r2 - o.inv_r;
  return o;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

} // namespace

TEST_CASE("analytic moments agree with quadrature") {
  for (double alpha : {1.0, 2.0, 5.0}) {
    for (double g0 : {0.01, 0.1, 1.0}) {
      for (double g1 : {0.0, 0.05}) {
        const RadialSqueezedState s(alpha, g0, g1);
        const auto m = moments(s);
        const auto o = quadrature_moments(s);
        CAPTURE(alpha);
        CAPTURE(g0);
        CAPTURE(g1);
        CHECK(std::abs(o.norm - 1.0) < 1e-10);
        CHECK(rel_close(m.r, o.r, 1e-8));
        CHECK(rel_close(m.r2, o.r2, 1e-8));
        CHECK(rel_close(m.inv_r, o.inv_r, 1e-8));
        CHECK(rel_close(m.inv_r2, o.inv_r2, 1e-8));
        CHECK(rel_close(m.p2, o.p2, 1e-8));
        if (g1 == 0.0) CHECK(std::abs(o.p) < 1e-8 * std::sqrt(m.p2));
        else CHECK(rel_close(m.p, o.p, 1e-8));
      }
    }
  }
}

TEST_CASE("closed-form moments") {
  const RadialSqueezedState s(1.0, 0.5, 0.0);
  const auto m = moments(s);
  CHECK(m.r == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(m.p == 0.0);
  CHECK(moments(RadialSqueezedState(2.0, 0.3, 0.07)).p == doctest::Approx(-0.07));
  CHECK(s.norm() == doctest::Approx(std::sqrt(std::pow(1.0, 5) / 24.0)).epsilon(1e-15));
}

TEST_CASE("uncertainty product") {
  for (double alpha : {0.6, 1.0, 2.0, 5.0, 94.2}) {
    for (double g0 : {0.01, 1.0}) {
      for (double g1 : {0.0, 0.05, -3.0}) {
        const auto m = moments(RadialSqueezedState(alpha, g0, g1));
        const double analytic = 0.5 * std::sqrt((2 * alpha + 3) / (2 * alpha + 1));
        CHECK(std::abs(m.uncertainty_product() - analytic) <= 1e-8 * analytic);
        CHECK(analytic_uncertainty_product(alpha) == doctest::Approx(analytic).epsilon(1e-15));
        CHECK(m.uncertainty_product() > 0.5);
      }
    }
  }
  const auto o = quadrature_moments(RadialSqueezedState(2.0, 0.1, 0.05));
  const double product = std::sqrt(o.r2 - o.r * o.r) * std::sqrt(o.p2 - o.p * o.p);
  CHECK(product == doctest::Approx(analytic_uncertainty_product(2.0)).epsilon(1e-8));
}

TEST_CASE("invalid states") {
  CHECK_THROWS_AS(RadialSqueezedState(0.5, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RadialSqueezedState(1.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SqueezedFitConditions::for_level(1, 0), std::invalid_argument);
  SqueezedSolveOptions bad;
  bad.alpha_lo = 0.4;
  CHECK_THROWS_AS(solve_parameters(SqueezedFitConditions::for_level(10), bad), std::invalid_argument);
}

TEST_CASE("outer apsis for n = 48") {
  CHECK(outer_apsis(48, 1) == doctest::Approx(4607.00).epsilon(1e-6));
  CHECK(outer_apsis(48, 1) == doctest::Approx(48.0 * 48 * (1 + std::sqrt(1 - 2.0 / (48 * 48)))).epsilon(1e-15));
  const auto cond = SqueezedFitConditions::for_level(48);
  CHECK(cond.e_target == doctest::Approx(-1.0 / 4608).epsilon(1e-15));
}

TEST_CASE("solver meets all three conditions") {
  for (int n : {10, 24, 48}) {
    const auto cond = SqueezedFitConditions::for_level(n, 1);
    const auto s = solve_parameters(cond, {});
    const auto res = condition_residuals(s, cond);
    CAPTURE(n);
    CHECK(s.gamma1() == 0.0);
    CHECK(res.p_r < 1e-10);
    CHECK(res.r < 1e-10);
    CHECK(res.energy < 1e-10);
    CHECK(s.gamma0() == doctest::Approx((2 * s.alpha() + 3) / (2 * cond.r_out)).epsilon(1e-15));
  }
}

TEST_CASE("n = 48 solution checked by quadrature energy") {
  const auto cond = SqueezedFitConditions::for_level(48, 1);
  const auto s = solve_parameters(cond, {});
  CHECK(s.alpha() == doctest::Approx(94.2058).epsilon(1e-5));
  CHECK(s.gamma0() == doctest::Approx(0.0207740).epsilon(1e-5));
  const auto o = quadrature_moments(s);
  CHECK(std::abs(o.h_kin - cond.e_target) < 10 * 1e-10 * std::abs(cond.e_target));
  CHECK(std::abs(o.r - cond.r_out) < 1e-9 * cond.r_out);
}

TEST_CASE("solver is consistent under radial rescaling") {
  // Fit a state, then ask for the conditions of the same state stretched by
  // two: the solver must return the same alpha with gamma0 halved.
  const auto base = solve_parameters(SqueezedFitConditions::for_level(30, 1), {});
  const RadialSqueezedState stretched(base.alpha(), 0.5 * base.gamma0(), 0.0);
  SqueezedFitConditions cond{30, 1, 2.0 * moments(base).r, expected_energy(moments(stretched), 1)};
  const auto s = solve_parameters(cond, {});
  CHECK(s.alpha() == doctest::Approx(base.alpha()).epsilon(1e-8));
  CHECK(s.gamma0() == doctest::Approx(0.5 * base.gamma0()).epsilon(1e-8));
}

TEST_CASE("solver reports a missing bracket") {
  SqueezedFitConditions cond = SqueezedFitConditions::for_level(48, 1);
  SqueezedSolveOptions opts;
  opts.alpha_lo = 0.6;
  opts.alpha_hi = 5.0;
  try {
    solve_parameters(cond, opts);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("[0.6, 5]") != std::string::npos);
  }
}

namespace {

const EigenExpansion& expansion48() {
  static const EigenExpansion e = [] {
    const auto s = solve_parameters(SqueezedFitConditions::for_level(48, 1), {});
    return expand_in_eigenbasis(s, 36, 60, 1);
  }();
  return e;
}

const EvolvedState& evolved48() {
  static const EvolvedState e = evolve(expansion48(), EnergyModel::hydrogen());
  return e;
}

double t_cl48_ns() { return au_to_ns(time_scales(EnergyModel::hydrogen(), 48.0).t_cl).value; }

} // namespace

TEST_CASE("eigenbasis expansion of the n = 48 state") {
  const auto& e = expansion48();
  CHECK(e.n.size() == 25);
  CHECK(e.captured_probability() > 0.99);
  CHECK(e.captured_probability() <= 1.0 + 1e-8);
  CHECK(e.dominant_level() == 48);
  for (const auto& c : e.c) CHECK(std::abs(c.imag()) < 1e-12);
}

TEST_CASE("evolved state at t = 0 reproduces the initial state") {
  const auto s = solve_parameters(SqueezedFitConditions::for_level(48, 1), {});
  const auto sample = evolved48().sample(TimeAu{0.0});
  CHECK(std::abs(sample.r_mean / outer_apsis(48, 1) - 1.0) < 0.01);
  CHECK(std::abs(sample.product() / analytic_uncertainty_product(s.alpha()) - 1.0) < 0.01);
  for (double r : {3000.0, 4607.0, 5200.0})
    CHECK(std::abs(evolved48().value(r, TimeAu{0.0}) - s(r)) < 1e-4 * std::abs(s(4607.0)));
}

TEST_CASE("radial oscillation and squeezing") {
  const double t_cl = t_cl48_ns();
  const auto start = evolved48().sample(TimeAu{0.0});
  const auto half = evolved48().sample(ns_to_au(TimeNs{0.5 * t_cl}));
  CHECK(half.r_mean < start.r_mean);
  const auto trace = uncertainty_trace(evolved48(), TimeGrid{0.0, 2.0 * t_cl, t_cl / 100});
  double lo = trace.front().product();
  double hi = lo;
  for (const auto& s : trace) {
    lo = std::min(lo, s.product());
    hi = std::max(hi, s.product());
    CHECK(s.product() >= 0.5 - 1e-9);
  }
  CHECK(hi - lo >= 0.05 * trace.front().product());
}

TEST_CASE("norm is conserved under evolution") {
  const double t_cl = t_cl48_ns();
  const double n0 = evolved48().norm_by_quadrature(TimeAu{0.0});
  for (double f : {0.25, 0.5, 1.3, 2.0}) {
    const double n = evolved48().norm_by_quadrature(ns_to_au(TimeNs{f * t_cl}));
    CHECK(std::abs(n - n0) < 1e-6);
    CHECK(evolved48().sample(ns_to_au(TimeNs{f * t_cl})).norm ==
          doctest::Approx(expansion48().captured_probability()).epsilon(1e-12));
  }
}

TEST_CASE("matrix-element moments agree with direct quadrature") {
  const auto t = ns_to_au(TimeNs{0.37 * t_cl48_ns()});
  const auto a = evolved48().sample(t);
  const auto b = evolved48().sample_by_quadrature(t);
  CHECK(a.r_mean == doctest::Approx(b.r_mean).epsilon(1e-7));
  CHECK(a.delta_r == doctest::Approx(b.delta_r).epsilon(1e-6));
  CHECK(a.delta_p == doctest::Approx(b.delta_p).epsilon(1e-6));
  CHECK(a.p_mean == doctest::Approx(b.p_mean).epsilon(1e-6));
}

TEST_CASE("uncertainty CSV") {
  const auto trace = uncertainty_trace(evolved48(), TimeGrid{0.0, 0.002, 0.001});
  const auto text = uncertainty_to_csv(trace);
  CHECK(text.rfind("t_ns,r_mean,delta_r,delta_p,product\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text == uncertainty_to_csv(uncertainty_trace(evolved48(), TimeGrid{0.0, 0.002, 0.001})));
}
