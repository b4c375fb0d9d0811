#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rydberg/spectrum.hpp"

namespace rydberg {

/// Gaussian excitation of a band of levels about a (possibly non-integer)
/// centre. Levels round(center) - W .. round(center) + W are retained.
struct PacketSpec {
  double center = 48.0;
  double sigma = 1.5;
  std::optional<int> window; ///< half-width W; ceil(5 sigma) when unset
  EnergyModel model = EnergyModel::hydrogen();

  int resolved_window() const;
  int central_level() const;
};

struct PacketComponent {
  int n = 0;        ///< principal quantum number
  int k = 0;        ///< n - round(center)
  double weight = 0.0; ///< |c_n|^2, weights sum to one
};

/// Uniform sampling grid in nanoseconds, t_i = start + i * step.
struct TimeGrid {
  double start_ns = 0.0;
  double end_ns = 4.0;
  double step_ns = 2e-4;

  std::size_t size() const;
  double at(std::size_t i) const { return start_ns + static_cast<double>(i) * step_ns; }
};

struct TraceSample {
  double t_ns = 0.0;
  std::complex<double> amplitude;
  double abs2 = 0.0;
};

struct AutocorrTrace {
  double t_start_ns = 0.0;
  double t_end_ns = 0.0;
  std::vector<TraceSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  /// Spacing of a uniformly sampled trace, 0 for fewer than two samples.
  double step_ns() const;
};

/// Normalised Gaussian probabilities |c_n|^2 ~ exp(-(n - center)^2 / (2 sigma^2)).
/// Throws std::invalid_argument when sigma <= 0, W < 0 or a retained level is
/// below n = 1 (or below the defect for defect models).
std::vector<PacketComponent> gaussian_weights(const PacketSpec& spec);

/// A(t) = sum_n |c_n|^2 exp(-i E_n t) with exact model energies. Phases are
/// reduced modulo one cycle in extended precision before the trig calls.
/// Samples are independent; `threads` > 1 splits the grid into contiguous
/// chunks and gives bit-identical output.
AutocorrTrace autocorr_exact(const PacketSpec& spec, const TimeGrid& grid, unsigned threads = 1);

/// Third-order truncated-phase model,
///   A3(t) = sum_n |c_n|^2 exp[-2 pi i (x t / T_cl - x^2 t / t_rev + x^3 t / t_sr)],
/// with x = n - center and the scales from time_scales at the centre.
AutocorrTrace autocorr_third_order(const PacketSpec& spec, const TimeGrid& grid,
                                   unsigned threads = 1);

/// Evaluate either model at arbitrary times (ns), no grid needed.
std::complex<double> amplitude_exact(const std::vector<PacketComponent>& components,
                                     const EnergyModel& model, double t_ns);

/// Header `t_ns,re_a,im_a,abs2`, shortest round-trip decimal, LF endings.
std::string trace_to_csv(const AutocorrTrace& trace);

/// Inverse of trace_to_csv. Throws std::invalid_argument on malformed input.
AutocorrTrace trace_from_csv(const std::string& text);

} // namespace rydberg
