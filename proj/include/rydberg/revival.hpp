#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rydberg/packet.hpp"
#include "rydberg/spectrum.hpp"

namespace rydberg {

struct Peak {
  double t_ns = 0.0;
  double height = 0.0;
};

struct PeakOptions {
  double min_height = 0.1;
  double min_separation_ns = 0.0; ///< <= 0 means one grid step
};

/// Local maxima of |A|^2 above min_height, greedily thinned (tallest first)
/// so that no two survivors are closer than min_separation_ns, then refined
/// by 3-point parabolic interpolation. Sorted by time. The trace must be
/// uniformly sampled.
std::vector<Peak> detect_peaks(const AutocorrTrace& trace, const PeakOptions& options);

struct PeriodOptions {
  /// Peaks below this fraction of the window maximum are ignored.
  double min_height_fraction = 0.7;
  /// Peaks within this distance of a taller one are merged into it. Set it
  /// to a few classical periods to read the envelope periodicity of a
  /// fractional superrevival rather than the Kepler oscillation.
  double cluster_radius_ns = 0.0;
};

/// Median spacing of consecutive peaks inside [center - width/2, center + width/2].
/// nullopt when fewer than three peaks survive.
std::optional<double> local_period(const AutocorrTrace& trace, double window_center_ns,
                                   double window_width_ns, const PeriodOptions& options = {});

enum class RevivalKind { Revival, FractionalSuperrevival, Superrevival };

std::string to_string(RevivalKind kind);

struct Prediction {
  RevivalKind kind = RevivalKind::Revival;
  int q = 0; ///< 0 for the full revival
  double t_pred_ns = 0.0;
  double t_frac_pred_ns = 0.0; ///< expected local periodicity
};

/// t_frac = t_sr / q and T_frac = (3 / q) t_rev for q = 3, 6, ..., q_max.
/// Throws std::invalid_argument for q_max < 3.
std::vector<Prediction> predict_superrevivals(const TimeScales& scales, int q_max);

struct ReportPeak {
  double t_ns = 0.0;
  double height = 0.0;
  std::optional<double> local_period_ns;
  std::optional<std::size_t> prediction; ///< index into RevivalReport::predictions
  double residual_ns = 0.0;              ///< t_ns - t_pred_ns when matched
};

struct Match {
  std::size_t prediction = 0;
  std::size_t peak = 0;
  double residual_ns = 0.0;
};

struct RevivalReport {
  std::vector<ReportPeak> peaks;
  std::vector<Prediction> predictions;
  std::vector<Match> matches;

  bool empty() const { return peaks.empty(); }
  const Match* match_for(std::size_t prediction) const;
  const Match* match_for(RevivalKind kind, int q = 0) const;
  /// Whether the superrevival peak is taller than the full-revival peak;
  /// nullopt unless both were matched.
  std::optional<bool> superrevival_exceeds_revival() const;
  /// Labels of the matched predictions, in prediction order.
  std::vector<std::string> matched_labels() const;
};

struct ClassifyOptions {
  int q_max = 12;
  double min_height = 0.1;
  /// Peak thinning distance as a fraction of T_cl.
  double min_separation_cl = 0.4;
  /// Allowed |t_peak - t_pred| as a fraction of t_pred.
  double match_tolerance = 0.05;
  /// Period windows span this many expected periods.
  double period_window_periods = 4.0;
  /// Cluster radius for superrevival periodicity, in units of T_cl.
  double cluster_radius_cl = 3.0;
  double period_height_fraction = 0.7;
};

/// Human-readable label, e.g. "revival", "superrevival (q=6)".
std::string prediction_label(const Prediction& p);

/// Space-free kind token for records: revival, superrevival,
/// fractional-superrevival.
std::string prediction_token(const Prediction& p);

/// Detect peaks and associate each prediction with the nearest detected
/// peak within the matching tolerance. Matched peaks carry a local period
/// measured over a window of a few expected periods.
RevivalReport classify(const AutocorrTrace& trace, const TimeScales& scales,
                       const ClassifyOptions& options = {});

/// Aligned text table of predictions and peaks.
std::string format_report_table(const RevivalReport& report);

/// One `key=value` record per line: every matched peak, then every
/// prediction with its status.
std::string format_report_records(const RevivalReport& report);

} // namespace rydberg
