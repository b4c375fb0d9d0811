#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "rydberg/quadrature.hpp"

namespace rydberg {

struct RadialValue {
  double value = 0.0;
  double derivative = 0.0; ///< dR/dr
};

/// Normalised hydrogen radial function
///   R_{n,l}(r) = N (2r/n)^l e^{-r/n} L_{n-l-1}^{2l+1}(2r/n),
/// evaluated in log space so that n ~ 50 and r ~ 3 n^2 stay finite.
class RadialEigenstate {
public:
  /// Throws std::invalid_argument unless 0 <= l < n.
  explicit RadialEigenstate(int n, int l = 1);

  int n() const { return n_; }
  int l() const { return l_; }

  double operator()(double r) const { return evaluate(r).value; }
  RadialValue evaluate(double r) const;

private:
  int n_;
  int l_;
  double log_norm_;
};

double radial_eigenfunction(int n, int l, double r);

/// Radius beyond which R_{n,l}^2 r^2 is negligible: max(3 n^2, 2 n^2 + 25 n + 30).
double default_r_max(int n);

/// Initial panels for radial integrals on [0, r_max], three quarters of them
/// inside the classically allowed region [0, 2 n^2].
std::vector<double> radial_breakpoints(int n, double r_max);

using RadialFunction = std::function<std::complex<double>(double)>;

/// <R_{n,l} | f> = int_0^{r_max} R_{n,l}(r) f(r) r^2 dr with r_max from the
/// rule (or default_r_max(n) when the rule leaves it at 0).
/// Throws NumericalError if the adaptive subdivision does not converge.
std::complex<double> overlap(const RadialFunction& f, int n, int l, const QuadratureRule& rule = {});

} // namespace rydberg
