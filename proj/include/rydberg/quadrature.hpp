#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rydberg {

/// Tolerances and limits for adaptive Gauss-Kronrod integration.
struct QuadratureRule {
  double abs_tol = 1e-12;
  double rel_tol = 1e-11;
  std::size_t max_panels = 20000;
  /// Upper integration limit for radial integrals; 0 selects a per-state
  /// default (see hydrogenic::default_r_max).
  double r_max = 0.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

/// Vector-valued integrand: writes `dims` values at x into out.
using BatchIntegrand = std::function<void(double x, std::span<double> out)>;

/// Globally adaptive 7/15-point Gauss-Kronrod integration of several
/// integrands sharing one panel tree. Starts from the given breakpoints
/// (at least two, increasing) and bisects the panel with the largest error
/// until every component meets max(abs_tol, rel_tol * |I_i|).
/// Throws NumericalError once max_panels is exceeded.
std::vector<QuadratureResult> integrate_batch(const BatchIntegrand& f, std::size_t dims,
                                              std::span<const double> breakpoints,
                                              const QuadratureRule& rule);

/// As above with a per-component absolute tolerance (size dims) in place of
/// rule.abs_tol, for batches whose components differ by orders of magnitude.
std::vector<QuadratureResult> integrate_batch(const BatchIntegrand& f, std::size_t dims,
                                              std::span<const double> breakpoints,
                                              const QuadratureRule& rule,
                                              std::span<const double> abs_tols);

/// Scalar integral over [a, b] split into `initial_panels` equal panels.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureRule& rule, std::size_t initial_panels = 1);

/// Scalar integral over the given breakpoints.
QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> breakpoints, const QuadratureRule& rule);

/// n equal panels on [a, b] as breakpoints.
std::vector<double> uniform_breakpoints(double a, double b, std::size_t n);

} // namespace rydberg
