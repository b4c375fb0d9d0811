#pragma once

#include <string>
#include <vector>

#include "rydberg/packet.hpp"
#include "rydberg/revival.hpp"
#include "rydberg/spectrum.hpp"

namespace rydberg {

struct ComparisonConfig {
  int n_center = 48;
  double delta = 0.5;
  double detuning = -0.5; ///< centre offset in units of n
  double sigma = 1.5;
  std::optional<int> window;
  TimeGrid grid{};
  ClassifyOptions classify{};

  /// Throws std::invalid_argument unless n_center - delta > 3/2 and |detuning| < 1.
  void validate() const;
};

/// Scales of the defect spectrum expanded at the integer resonance n_center.
TimeScales scales_with_defect(int n_center, double delta);

/// Hydrogen scales at the detuned centre n_center + detuning.
TimeScales scales_with_detuning(int n_center, double detuning);

struct LevelShiftRow {
  int n = 0;
  double e_hydrogen = 0.0;
  double e_defect = 0.0;
  double d_n = 0.0; ///< e_defect - e_hydrogen
};

struct LevelShiftProfile {
  std::vector<LevelShiftRow> rows;
  double spread = 0.0; ///< max d_n - min d_n
};

/// Per-level difference between a defect spectrum (with an optional rigid
/// shift) and hydrogen. A defect shifts levels unevenly (spread > 0); a rigid
/// shift moves them all alike (spread 0).
LevelShiftProfile level_shift_profile(int n_lo, int n_hi, double delta, double global_shift = 0.0);

/// Columns n,e_hydrogen,e_defect,d_n.
std::string level_shift_csv(const LevelShiftProfile& profile);

struct RevivalComparison {
  PacketSpec detuned;  ///< hydrogen, centre n_center + detuning
  PacketSpec defect;   ///< defect model, centre n_center
  TimeScales detuned_scales;
  TimeScales defect_scales;
  RevivalReport detuned_report;
  RevivalReport defect_report;
  /// max over predictions matched in both reports of |dt| / T_cl.
  double max_shift_cl = 0.0;
  /// max over predictions matched in both reports of |dt| in ns.
  double max_shift_ns = 0.0;
  /// Shift of the full-revival peak in ns (0 if either report lacks it).
  double revival_shift_ns = 0.0;
  double max_height_difference = 0.0;
  /// Predictions matched in exactly one of the two reports.
  int unmatched = 0;

  /// max_shift_cl + unmatched.
  double metric() const { return max_shift_cl + unmatched; }
  bool identical() const;
};

/// Runs the exact autocorrelation and classification for a detuned hydrogen
/// packet and for an on-resonance defect packet at the same effective
/// centre, then diffs the matched peaks. The two runs are independent and
/// execute concurrently.
RevivalComparison compare_revival_structure(const ComparisonConfig& cfg);

/// `key=value` records mirroring the revival report format.
std::string format_comparison_records(const RevivalComparison& cmp);

} // namespace rydberg
