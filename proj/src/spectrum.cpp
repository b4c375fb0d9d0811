#include "rydberg/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rydberg {

namespace {

double checked_effective(const EnergyModel& model, double nu) {
  const double eff = model.effective(nu);
  if (!(eff > 0.0) || !std::isfinite(eff))
    throw std::invalid_argument("effective quantum number must be positive, got " +
                                std::to_string(eff));
  return eff;
}

} // namespace

EnergyModel EnergyModel::quantum_defect(double delta, double shift) {
  if (!(delta >= 0.0)) throw std::invalid_argument("quantum defect must be non-negative");
  return EnergyModel{EnergyKind::QuantumDefect, delta, shift};
}

double energy(const EnergyModel& model, int n) {
  if (n < 1) throw std::invalid_argument("principal quantum number must be >= 1");
  return energy_at(model, static_cast<double>(n));
}

double energy_at(const EnergyModel& model, double nu) {
  const double eff = checked_effective(model, nu);
  return -0.5 / (eff * eff) + model.global_shift;
}

double energy_derivative(const EnergyModel& model, double center, int order) {
  const double eff = checked_effective(model, center);
  switch (order) {
  case 1: return 1.0 / (eff * eff * eff);
  case 2: return -3.0 / (eff * eff * eff * eff);
  case 3: return 12.0 / (eff * eff * eff * eff * eff);
  default: throw std::invalid_argument("derivative order must be 1, 2 or 3");
  }
}

std::vector<double> energy_derivatives(const EnergyModel& model, double center, int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("derivative order must be 1, 2 or 3");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(order));
  for (int k = 1; k <= order; ++k) out.push_back(energy_derivative(model, center, k));
  return out;
}

TimeScales time_scales(const EnergyModel& model, double center) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double d1 = energy_derivative(model, center, 1);
  const double d2 = energy_derivative(model, center, 2);
  const double d3 = energy_derivative(model, center, 3);
  // E'' < 0 for a Coulomb ladder; the sign is folded in so t_rev > 0.
  return TimeScales{TimeAu{two_pi / d1}, TimeAu{-two_pi / (0.5 * d2)},
                    TimeAu{two_pi / (d3 / 6.0)}};
}

double energy_detuning(const EnergyModel& model, double center, double detuning_n) {
  return energy_derivative(model, center, 1) * detuning_n;
}

double center_detuning(const EnergyModel& model, double center, double detuning_energy) {
  return detuning_energy / energy_derivative(model, center, 1);
}

std::vector<double> level_spacings(const EnergyModel& model, int n_lo, int n_hi) {
  std::vector<double> out;
  for (int n = n_lo; n < n_hi; ++n) out.push_back(energy(model, n + 1) - energy(model, n));
  return out;
}

} // namespace rydberg
