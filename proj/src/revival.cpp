#include "rydberg/revival.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rydberg/csv.hpp"
#include "rydberg/units.hpp"

namespace rydberg {

namespace {

void require_uniform(const AutocorrTrace& trace) {
  const double step = trace.step_ns();
  if (trace.size() < 3) return;
  if (!(step > 0.0)) throw std::invalid_argument("trace times must be increasing");
  const double t0 = trace.samples.front().t_ns;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double expected = t0 + static_cast<double>(i) * step;
    if (std::abs(trace.samples[i].t_ns - expected) > 1e-6 * step)
      throw std::invalid_argument("trace must be uniformly sampled");
  }
}

// Indices of samples with t in [lo_ns, hi_ns].
std::pair<std::size_t, std::size_t> index_range(const AutocorrTrace& trace, double lo_ns,
                                                double hi_ns) {
  const auto& s = trace.samples;
  const auto first = std::lower_bound(s.begin(), s.end(), lo_ns,
                                      [](const TraceSample& a, double t) { return a.t_ns < t; });
  const auto last = std::upper_bound(s.begin(), s.end(), hi_ns,
                                     [](double t, const TraceSample& a) { return t < a.t_ns; });
  return {static_cast<std::size_t>(first - s.begin()), static_cast<std::size_t>(last - s.begin())};
}

Peak refine(const AutocorrTrace& trace, std::size_t i) {
  const double y0 = trace.samples[i - 1].abs2;
  const double y1 = trace.samples[i].abs2;
  const double y2 = trace.samples[i + 1].abs2;
  const double denom = y0 - 2.0 * y1 + y2;
  double offset = 0.0;
  if (denom < 0.0) offset = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
  const double height = y1 - 0.25 * (y0 - y2) * offset;
  return Peak{trace.samples[i].t_ns + offset * trace.step_ns(), std::min(height, 1.0)};
}

// Rises smaller than this are rounding noise on a flat trace (|A|^2 of a
// single phasor is 1 only to a few ulp).
constexpr double kFlatTolerance = 1e-12;

// Local maxima with index in [lo, hi), height >= threshold, thinned tallest
// first to the given separation.
std::vector<Peak> find_peaks(const AutocorrTrace& trace, std::size_t lo, std::size_t hi,
                             double threshold, double min_separation) {
  const auto& s = trace.samples;
  std::vector<std::size_t> candidates;
  lo = std::max<std::size_t>(lo, 1);
  hi = std::min(hi, s.size() >= 1 ? s.size() - 1 : 0);
  for (std::size_t i = lo; i < hi; ++i) {
    if (s[i].abs2 > s[i - 1].abs2 + kFlatTolerance && s[i].abs2 >= s[i + 1].abs2 &&
        s[i].abs2 >= threshold)
      candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return s[a].abs2 > s[b].abs2; });

  std::set<double> kept_times;
  std::vector<std::size_t> kept;
  for (std::size_t i : candidates) {
    const double t = s[i].t_ns;
    const auto next = kept_times.lower_bound(t);
    if (next != kept_times.end() && *next - t < min_separation) continue;
    if (next != kept_times.begin() && t - *std::prev(next) < min_separation) continue;
    kept_times.insert(t);
    kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());

  std::vector<Peak> peaks;
  peaks.reserve(kept.size());
  for (std::size_t i : kept) peaks.push_back(refine(trace, i));
  return peaks;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string("none");
}

} // namespace

std::vector<Peak> detect_peaks(const AutocorrTrace& trace, const PeakOptions& options) {
  if (trace.size() < 3) return {};
  require_uniform(trace);
  const double step = trace.step_ns();
  const double sep = options.min_separation_ns > 0.0 ? options.min_separation_ns : step;
  // Strictly above the threshold.
  const double threshold = std::nextafter(options.min_height, 2.0);
  return find_peaks(trace, 0, trace.size(), threshold, sep);
}

std::optional<double> local_period(const AutocorrTrace& trace, double window_center_ns,
                                   double window_width_ns, const PeriodOptions& options) {
  if (trace.size() < 3 || !(window_width_ns > 0.0)) return std::nullopt;
  require_uniform(trace);
  const auto [lo, hi] = index_range(trace, window_center_ns - 0.5 * window_width_ns,
                                    window_center_ns + 0.5 * window_width_ns);
  if (hi <= lo) return std::nullopt;

  double peak_max = 0.0;
  for (std::size_t i = lo; i < hi; ++i) peak_max = std::max(peak_max, trace.samples[i].abs2);
  if (!(peak_max > 0.0)) return std::nullopt;

  const double sep = std::max(options.cluster_radius_ns, trace.step_ns());
  const auto peaks = find_peaks(trace, lo, hi, options.min_height_fraction * peak_max, sep);
  if (peaks.size() < 3) return std::nullopt;

  std::vector<double> spacing;
  for (std::size_t i = 1; i < peaks.size(); ++i) spacing.push_back(peaks[i].t_ns - peaks[i - 1].t_ns);
  return median(std::move(spacing));
}

std::string to_string(RevivalKind kind) {
  switch (kind) {
  case RevivalKind::Revival: return "revival";
  case RevivalKind::FractionalSuperrevival: return "fractional superrevival";
  case RevivalKind::Superrevival: return "superrevival";
  }
  return "unknown";
}

std::vector<Prediction> predict_superrevivals(const TimeScales& scales, int q_max) {
  if (q_max < 3) throw std::invalid_argument("q_max must be at least 3");
  const double t_sr = au_to_ns(scales.t_sr).value;
  const double t_rev = au_to_ns(scales.t_rev).value;
  std::vector<Prediction> out;
  for (int q = 3; q <= q_max; q += 3) {
    const RevivalKind kind = q == 6 ? RevivalKind::Superrevival : RevivalKind::FractionalSuperrevival;
    out.push_back(Prediction{kind, q, t_sr / q, 3.0 / q * t_rev});
  }
  return out;
}

std::string prediction_token(const Prediction& p) {
  switch (p.kind) {
  case RevivalKind::Revival: return "revival";
  case RevivalKind::Superrevival: return "superrevival";
  case RevivalKind::FractionalSuperrevival: return "fractional-superrevival";
  }
  return "unknown";
}

std::string prediction_label(const Prediction& p) {
  if (p.kind == RevivalKind::Revival) return "revival";
  return to_string(p.kind) + " (q=" + std::to_string(p.q) + ")";
}

const Match* RevivalReport::match_for(std::size_t prediction) const {
  for (const auto& m : matches)
    if (m.prediction == prediction) return &m;
  return nullptr;
}

const Match* RevivalReport::match_for(RevivalKind kind, int q) const {
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    if (p.kind == kind && (kind == RevivalKind::Revival || p.q == q)) return match_for(i);
  }
  return nullptr;
}

std::optional<bool> RevivalReport::superrevival_exceeds_revival() const {
  const Match* rev = match_for(RevivalKind::Revival);
  const Match* sr = match_for(RevivalKind::Superrevival, 6);
  if (!rev || !sr) return std::nullopt;
  return peaks[sr->peak].height > peaks[rev->peak].height;
}

std::vector<std::string> RevivalReport::matched_labels() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (match_for(i)) out.push_back(prediction_label(predictions[i]));
  return out;
}

RevivalReport classify(const AutocorrTrace& trace, const TimeScales& scales,
                       const ClassifyOptions& options) {
  RevivalReport report;
  const double t_cl = au_to_ns(scales.t_cl).value;
  report.predictions.push_back(
      Prediction{RevivalKind::Revival, 0, au_to_ns(scales.t_rev).value, t_cl});
  for (const auto& p : predict_superrevivals(scales, options.q_max)) report.predictions.push_back(p);

  const auto peaks =
      detect_peaks(trace, PeakOptions{options.min_height, options.min_separation_cl * t_cl});
  for (const auto& p : peaks) report.peaks.push_back(ReportPeak{p.t_ns, p.height, {}, {}, 0.0});
  if (peaks.empty()) return report;

  for (std::size_t j = 0; j < report.predictions.size(); ++j) {
    const double t_pred = report.predictions[j].t_pred_ns;
    const double tol = options.match_tolerance * t_pred;
    const auto it = std::lower_bound(peaks.begin(), peaks.end(), t_pred,
                                     [](const Peak& p, double t) { return p.t_ns < t; });
    std::optional<std::size_t> best;
    auto consider = [&](std::size_t i) {
      const double d = std::abs(peaks[i].t_ns - t_pred);
      if (d > tol) return;
      if (!best || d < std::abs(peaks[*best].t_ns - t_pred)) best = i;
    };
    const auto idx = static_cast<std::size_t>(it - peaks.begin());
    if (idx > 0) consider(idx - 1);
    if (idx < peaks.size()) consider(idx);
    if (best) report.matches.push_back(Match{j, *best, peaks[*best].t_ns - t_pred});
  }

  for (const auto& m : report.matches) {
    auto& peak = report.peaks[m.peak];
    if (peak.prediction && std::abs(peak.residual_ns) <= std::abs(m.residual_ns)) continue;
    peak.prediction = m.prediction;
    peak.residual_ns = m.residual_ns;

    const auto& pred = report.predictions[m.prediction];
    PeriodOptions period;
    period.min_height_fraction = options.period_height_fraction;
    if (pred.kind != RevivalKind::Revival)
      period.cluster_radius_ns = std::min(options.cluster_radius_cl * t_cl, 0.5 * pred.t_frac_pred_ns);
    peak.local_period_ns = local_period(trace, pred.t_pred_ns,
                                        options.period_window_periods * pred.t_frac_pred_ns, period);
  }
  return report;
}

std::string format_report_table(const RevivalReport& report) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "detected peaks: " << report.peaks.size() << "\n";
  os << std::left << std::setw(30) << "prediction" << std::right << std::setw(12) << "t_pred_ns"
     << std::setw(12) << "T_frac_ns" << std::setw(12) << "t_peak_ns" << std::setw(10) << "height"
     << std::setw(13) << "residual_ns" << std::setw(12) << "period_ns" << "\n";
  for (std::size_t j = 0; j < report.predictions.size(); ++j) {
    const auto& p = report.predictions[j];
    os << std::left << std::setw(30) << prediction_label(p) << std::right << std::setw(12)
       << p.t_pred_ns << std::setw(12) << p.t_frac_pred_ns;
    if (const Match* m = report.match_for(j)) {
      const auto& peak = report.peaks[m->peak];
      os << std::setw(12) << peak.t_ns << std::setw(10) << peak.height << std::setw(13)
         << m->residual_ns << std::setw(12);
      if (peak.local_period_ns) os << *peak.local_period_ns;
      else os << "-";
    } else {
      os << std::setw(12) << "absent";
    }
    os << "\n";
  }
  if (const auto exceeds = report.superrevival_exceeds_revival())
    os << "superrevival taller than revival: " << (*exceeds ? "yes" : "no") << "\n";
  return os.str();
}

std::string format_report_records(const RevivalReport& report) {
  std::string out;
  for (const auto& peak : report.peaks) {
    out += "peak t_ns=" + csv::format_double(peak.t_ns) +
           " height=" + csv::format_double(peak.height) +
           " period_ns=" + fmt_opt(peak.local_period_ns);
    if (peak.prediction) {
      const auto& p = report.predictions[*peak.prediction];
      out += " label=" + prediction_token(p) + " q=" + std::to_string(p.q) +
             " residual_ns=" + csv::format_double(peak.residual_ns);
    } else {
      out += " label=none q=none residual_ns=none";
    }
    out += '\n';
  }
  for (std::size_t j = 0; j < report.predictions.size(); ++j) {
    const auto& p = report.predictions[j];
    out += "prediction label=" + prediction_token(p) + " q=" + std::to_string(p.q) +
           " t_pred_ns=" + csv::format_double(p.t_pred_ns) +
           " t_frac_pred_ns=" + csv::format_double(p.t_frac_pred_ns);
    if (const Match* m = report.match_for(j)) {
      out += " status=matched t_ns=" + csv::format_double(report.peaks[m->peak].t_ns) +
             " residual_ns=" + csv::format_double(m->residual_ns);
    } else {
      out += " status=absent";
    }
    out += '\n';
  }
  return out;
}

} // namespace rydberg
