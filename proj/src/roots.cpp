#include "rydberg/roots.hpp"

#include <cmath>
#include <stdexcept>

#include "rydberg/error.hpp"

namespace rydberg {

std::optional<Bracket> scan_bracket(const std::function<double(double)>& f, double lo, double hi,
                                    int samples, bool log_spacing) {
  if (samples < 2 || !(hi > lo)) throw std::invalid_argument("invalid scan range");
  if (log_spacing && !(lo > 0.0)) throw std::invalid_argument("log scan requires lo > 0");
  auto point = [&](int i) {
    const double s = static_cast<double>(i) / (samples - 1);
    if (i == samples - 1) return hi;
    return log_spacing ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s;
  };
  double x_prev = point(0);
  double f_prev = f(x_prev);
  if (f_prev == 0.0) return Bracket{x_prev, x_prev};
  for (int i = 1; i < samples; ++i) {
    const double x = point(i);
    const double fx = f(x);
    if (fx == 0.0 || std::signbit(fx) != std::signbit(f_prev)) return Bracket{x_prev, x};
    x_prev = x;
    f_prev = fx;
  }
  return std::nullopt;
}

double solve_bracketed(const std::function<double(double)>& f, Bracket bracket,
                       const RootOptions& options) {
  double a = bracket.lo;
  double b = bracket.hi;
  double fa = f(a);
  if (fa == 0.0 || a == b) return a;
  double fb = f(b);
  if (fb == 0.0) return b;
  if (std::signbit(fa) == std::signbit(fb))
    throw std::invalid_argument("root bracket does not change sign");

  double width_before = std::abs(b - a);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double x = b - fb * (b - a) / (fb - fa);
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    // Fall back to bisection when the secant leaves the bracket or the
    // bracket failed to halve over the last step.
    if (!(x > lo && x < hi) || std::abs(b - a) > 0.5 * width_before) x = 0.5 * (a + b);
    width_before = std::abs(b - a);

    const double fx = f(x);
    if (fx == 0.0 || std::abs(fx) <= options.f_tol) return x;
    if (std::signbit(fx) == std::signbit(fa)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (std::abs(b - a) <= options.x_tol * std::max(std::abs(a), std::abs(b)))
      return std::abs(fa) < std::abs(fb) ? a : b;
  }
  throw NumericalError("bracketed root search exhausted its iteration budget");
}

} // namespace rydberg
