#pragma once

#include <complex>
#include <string>
#include <vector>

#include "rydberg/hydrogenic.hpp"
#include "rydberg/packet.hpp"
#include "rydberg/quadrature.hpp"
#include "rydberg/spectrum.hpp"
#include "rydberg/units.hpp"

namespace rydberg {

/// psi(r) = N r^alpha e^{-gamma0 r} e^{-i gamma1 r},
/// N^2 = (2 gamma0)^{2 alpha + 3} / Gamma(2 alpha + 3), so that
/// int |psi|^2 r^2 dr = 1.
class RadialSqueezedState {
public:
  /// Throws std::invalid_argument unless alpha > 1/2 and gamma0 > 0.
  RadialSqueezedState(double alpha, double gamma0, double gamma1);

  double alpha() const { return alpha_; }
  double gamma0() const { return gamma0_; }
  double gamma1() const { return gamma1_; }
  double norm() const;
  double log_norm() const { return log_norm_; }

  std::complex<double> operator()(double r) const;

private:
  double alpha_;
  double gamma0_;
  double gamma1_;
  double log_norm_;
};

/// Expectation values with the radial momentum p_r = -i (d/dr + 1/r).
struct SqueezedMoments {
  double r = 0.0;
  double r2 = 0.0;
  double inv_r = 0.0;
  double inv_r2 = 0.0;
  double p = 0.0;
  double p2 = 0.0;

  double delta_r() const;
  double delta_p() const;
  double uncertainty_product() const { return delta_r() * delta_p(); }
};

/// Closed forms: <r^m> = Gamma(2a+3+m) / (Gamma(2a+3) (2 g0)^m),
/// <p_r> = -g1, <p_r^2> = g1^2 + g0^2 / (2a + 1).
SqueezedMoments moments(const RadialSqueezedState& state);

/// <H> = <p_r^2>/2 + l(l+1)/2 <1/r^2> - <1/r>.
double expected_energy(const SqueezedMoments& m, int l);

/// Delta r * Delta p_r = sqrt((2a + 3) / (2a + 1)) / 2, independent of g0, g1.
double analytic_uncertainty_product(double alpha);

/// Outer classical turning point n^2 (1 + sqrt(1 - l(l+1)/n^2)).
double outer_apsis(int n_bar, int l);

struct SqueezedFitConditions {
  int n_bar = 48;
  int l = 1;
  double r_out = 0.0;
  double e_target = 0.0;

  /// Kepler conditions for the level n_bar: r_out from outer_apsis and
  /// e_target = -1 / (2 n_bar^2).
  static SqueezedFitConditions for_level(int n_bar, int l = 1);
};

struct ConditionResiduals {
  double p_r = 0.0;    ///< |<p_r>|
  double r = 0.0;      ///< |<r> - r_out| / r_out
  double energy = 0.0; ///< |<H> - E| / |E|
  double max() const;
};

ConditionResiduals condition_residuals(const RadialSqueezedState& state,
                                       const SqueezedFitConditions& cond);

struct SqueezedSolveOptions {
  double tol = 1e-10;
  double alpha_lo = 0.6;
  double alpha_hi = 0.0; ///< 0 selects 4 n_bar
  int scan_samples = 400;
};

/// gamma1 = 0 (from <p_r> = 0), gamma0 = (2 alpha + 3) / (2 r_out) (from
/// <r> = r_out), and alpha from a log-grid scan plus bracketed root search
/// on <H>(alpha) - E. Throws NumericalError naming the scanned interval
/// when no sign change is found, or when the residuals miss `tol`;
/// std::invalid_argument for a bad scan interval.
RadialSqueezedState solve_parameters(const SqueezedFitConditions& cond,
                                     const SqueezedSolveOptions& options = {});

struct EigenExpansion {
  int l = 1;
  std::vector<int> n;
  std::vector<std::complex<double>> c;

  double captured_probability() const;
  int dominant_level() const;
};

/// Quadrature rule sized for projecting `state` on levels up to n_max.
QuadratureRule expansion_rule(const RadialSqueezedState& state, int n_max);

/// c_n = <R_{n,l} | psi> for n in [n_lo, n_hi]. A rule with r_max = 0 is
/// widened with expansion_rule.
EigenExpansion expand_in_eigenbasis(const RadialSqueezedState& state, int n_lo, int n_hi,
                                    int l = 1, QuadratureRule rule = {});

struct UncertaintySample {
  double t_ns = 0.0;
  double norm = 0.0;
  double r_mean = 0.0;
  double delta_r = 0.0;
  double p_mean = 0.0;
  double delta_p = 0.0;
  double product() const { return delta_r * delta_p; }
};

/// psi(r, t) = sum_n c_n R_{n,l}(r) exp(-i E_n t). Moments come from matrix
/// elements <n|O|m> integrated once at construction; per-time cost is
/// O(levels^2). Expectation values are normalised by the captured norm.
class EvolvedState {
public:
  EvolvedState(EigenExpansion expansion, EnergyModel model, const QuadratureRule& rule = {});

  std::complex<double> value(double r, TimeAu t) const;
  UncertaintySample sample(TimeAu t) const;

  /// Direct quadrature of |psi(r,t)|^2 r^2 and of the moment integrands,
  /// bypassing the matrix elements.
  double norm_by_quadrature(TimeAu t) const;
  UncertaintySample sample_by_quadrature(TimeAu t) const;

  const EigenExpansion& expansion() const { return expansion_; }
  double r_max() const { return r_max_; }

private:
  std::vector<std::complex<double>> amplitudes(TimeAu t) const;

  EigenExpansion expansion_;
  EnergyModel model_;
  QuadratureRule rule_;
  double r_max_ = 0.0;
  std::vector<RadialEigenstate> states_;
  std::vector<double> energies_;
  // Row-major levels x levels.
  std::vector<double> overlap_, r1_, r2_, dmat_, p2_;
};

EvolvedState evolve(const EigenExpansion& expansion, const EnergyModel& model,
                    const QuadratureRule& rule = {});

std::vector<UncertaintySample> uncertainty_trace(const EvolvedState& state, const TimeGrid& grid);

/// Header `t_ns,r_mean,delta_r,delta_p,product`, same number formatting as
/// the autocorrelation CSV.
std::string uncertainty_to_csv(const std::vector<UncertaintySample>& samples);

} // namespace rydberg
