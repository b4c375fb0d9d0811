#include "rydberg/special.hpp"

#include <cmath>
#include <stdexcept>

namespace rydberg::special {

ScaledLaguerre laguerre_scaled(int degree, double alpha, double x) {
  if (degree < 0) throw std::invalid_argument("Laguerre degree must be non-negative");
  ScaledLaguerre out{1.0, 0.0, 0.0};
  if (degree == 0) return out;

  constexpr double kBig = 1e150;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int j = 1; j < degree; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      out.log_scale += std::log(kBig);
    }
  }
  out.value = cur;
  out.previous = prev;
  return out;
}

double laguerre(int degree, double alpha, double x) {
  const auto s = laguerre_scaled(degree, alpha, x);
  return s.value * std::exp(s.log_scale);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("log_gamma requires a positive argument");
  return std::lgamma(x);
}

} // namespace rydberg::special
