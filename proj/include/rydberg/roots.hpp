#pragma once

#include <functional>
#include <optional>

namespace rydberg {

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// First sign change of f on a grid of `samples` points over [lo, hi],
/// logarithmically spaced when `log_spacing` is set (requires lo > 0).
std::optional<Bracket> scan_bracket(const std::function<double(double)>& f, double lo, double hi,
                                    int samples, bool log_spacing);

struct RootOptions {
  double x_tol = 1e-14;  ///< relative width at which the bracket is accepted
  double f_tol = 0.0;    ///< |f| at or below this ends the search
  int max_iterations = 200;
};

/// Root of f inside a sign-changing bracket. Secant steps are taken when
/// they land inside the bracket and shrink it fast enough; bisection
/// otherwise. Throws std::invalid_argument if f(lo), f(hi) share a sign and
/// NumericalError if the iteration budget runs out.
double solve_bracketed(const std::function<double(double)>& f, Bracket bracket,
                       const RootOptions& options = {});

} // namespace rydberg
