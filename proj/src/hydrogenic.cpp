#include "rydberg/hydrogenic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rydberg/special.hpp"

namespace rydberg {

namespace {

// sign(m) * exp(log_scale + log|m|) without intermediate overflow.
double scaled(double mantissa, double log_scale) {
  if (mantissa == 0.0) return 0.0;
  return std::copysign(std::exp(log_scale + std::log(std::abs(mantissa))), mantissa);
}

} // namespace

RadialEigenstate::RadialEigenstate(int n, int l) : n_(n), l_(l) {
  if (l < 0 || n < l + 1) throw std::invalid_argument("radial eigenstate requires 0 <= l < n");
  const double nd = n;
  log_norm_ = 0.5 * (3.0 * std::log(2.0 / nd) + special::log_gamma(n - l) - std::log(2.0 * nd) -
                     special::log_gamma(n + l + 1.0));
}

RadialValue RadialEigenstate::evaluate(double r) const {
  if (!(r > 0.0)) throw std::invalid_argument("radial eigenfunction requires r > 0");
  const double x = 2.0 * r / n_;
  const int degree = n_ - l_ - 1;
  const double alpha = 2.0 * l_ + 1.0;
  const auto lag = special::laguerre_scaled(degree, alpha, x);
  const double log_prefactor = log_norm_ + l_ * std::log(x) - 0.5 * x + lag.log_scale;

  // x dL_k/dx = k L_k - (k + a) L_{k-1}
  const double dlag = degree > 0 ? (degree * lag.value - (degree + alpha) * lag.previous) / x : 0.0;
  const double bracket = (l_ > 0 ? (l_ / x) * lag.value : 0.0) - 0.5 * lag.value + dlag;

  return RadialValue{scaled(lag.value, log_prefactor),
                     (2.0 / n_) * scaled(bracket, log_prefactor)};
}

double radial_eigenfunction(int n, int l, double r) { return RadialEigenstate(n, l)(r); }

double default_r_max(int n) {
  const double nd = n;
  return std::max(3.0 * nd * nd, 2.0 * nd * nd + 25.0 * nd + 30.0);
}

std::vector<double> radial_breakpoints(int n, double r_max) {
  constexpr std::size_t kInner = 48;
  constexpr std::size_t kOuter = 16;
  const double turning = std::min(2.0 * n * n, r_max);
  auto bp = uniform_breakpoints(0.0, turning, kInner);
  if (r_max > turning) {
    const auto outer = uniform_breakpoints(turning, r_max, kOuter);
    bp.insert(bp.end(), outer.begin() + 1, outer.end());
  }
  return bp;
}

std::complex<double> overlap(const RadialFunction& f, int n, int l, const QuadratureRule& rule) {
  const RadialEigenstate state(n, l);
  const double r_max = rule.r_max > 0.0 ? rule.r_max : default_r_max(n);
  const auto bp = radial_breakpoints(n, r_max);
  const BatchIntegrand integrand = [&](double r, std::span<double> out) {
    if (r <= 0.0) {
      out[0] = out[1] = 0.0;
      return;
    }
    const std::complex<double> v = state(r) * f(r) * (r * r);
    out[0] = v.real();
    out[1] = v.imag();
  };
  const auto res = integrate_batch(integrand, 2, bp, rule);
  return {res[0].value, res[1].value};
}

} // namespace rydberg
