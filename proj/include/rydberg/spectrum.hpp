#pragma once

#include <vector>

#include "rydberg/units.hpp"

namespace rydberg {

enum class EnergyKind { Hydrogen, QuantumDefect };

/// Bound-state spectrum E(n) = -1/(2 (n - delta)^2) + global_shift in atomic
/// units. Hydrogen is the delta = 0 case.
struct EnergyModel {
  EnergyKind kind = EnergyKind::Hydrogen;
  double delta = 0.0;        ///< quantum defect, used for QuantumDefect only
  double global_shift = 0.0; ///< rigid offset of every level (a.u.)

  static EnergyModel hydrogen(double shift = 0.0) {
    return EnergyModel{EnergyKind::Hydrogen, 0.0, shift};
  }
  static EnergyModel quantum_defect(double delta, double shift = 0.0);

  /// Defect actually applied: zero for hydrogen.
  double applied_defect() const { return kind == EnergyKind::QuantumDefect ? delta : 0.0; }
  /// Effective quantum number nu - delta.
  double effective(double nu) const { return nu - applied_defect(); }
};

/// Classical Kepler period, revival time and superrevival time. All stored
/// as positive durations.
struct TimeScales {
  TimeAu t_cl;
  TimeAu t_rev;
  TimeAu t_sr;
};

/// Level energy for integer principal quantum number n >= 1.
/// Throws std::invalid_argument if n < 1 or n - delta <= 0.
double energy(const EnergyModel& model, int n);

/// The same formula continued to a real argument.
double energy_at(const EnergyModel& model, double nu);

/// d^k E / d nu^k at a real centre, k in 1..3. Returns order entries,
/// element i holding the (i+1)-th derivative.
std::vector<double> energy_derivatives(const EnergyModel& model, double center, int order);

/// Single derivative of the given order (1..3).
double energy_derivative(const EnergyModel& model, double center, int order);

/// Taylor time scales about a real centre:
///   t_cl = 2 pi / E',  t_rev = 2 pi / (|E''| / 2),  t_sr = 2 pi / (E''' / 6).
/// For hydrogen these reduce to 2 pi nu^3, (2 nu / 3) t_cl and (3 nu / 4) t_rev.
/// The ordering t_cl < t_rev < t_sr holds for effective centres above 3/2.
TimeScales time_scales(const EnergyModel& model, double center);

/// Energy detuning equivalent to shifting the excitation centre by
/// detuning_n (in units of n), linearised through E'(center).
double energy_detuning(const EnergyModel& model, double center, double detuning_n);

/// Inverse of energy_detuning.
double center_detuning(const EnergyModel& model, double center, double detuning_energy);

/// Consecutive spacings E(n+1) - E(n) for n in [n_lo, n_hi).
std::vector<double> level_spacings(const EnergyModel& model, int n_lo, int n_hi);

} // namespace rydberg
