#pragma once

namespace rydberg::special {

/// L_k^a(x) and L_{k-1}^a(x) sharing one scale factor:
/// true value = mantissa * exp(log_scale).
struct ScaledLaguerre {
  double value = 0.0;    ///< mantissa of L_k
  double previous = 0.0; ///< mantissa of L_{k-1} (0 for k = 0)
  double log_scale = 0.0;
};

/// Upward three-term recurrence in the degree,
///   (j+1) L_{j+1} = (2j + 1 + a - x) L_j - (j + a) L_{j-1},
/// rescaled whenever the iterates grow past 1e150 so that high degrees at
/// large x stay within double range.
ScaledLaguerre laguerre_scaled(int degree, double alpha, double x);

/// Unscaled convenience wrapper; may overflow for large arguments.
double laguerre(int degree, double alpha, double x);

/// log((n)!) style helper: log Gamma(x) for x > 0.
double log_gamma(double x);

} // namespace rydberg::special
