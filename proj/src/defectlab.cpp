#include "rydberg/defectlab.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "rydberg/csv.hpp"

namespace rydberg {

void ComparisonConfig::validate() const {
  if (!(n_center - delta > 1.5)) throw std::invalid_argument("need n_center - delta > 3/2");
  if (!(delta >= 0.0)) throw std::invalid_argument("quantum defect must be non-negative");
  if (!(std::abs(detuning) < 1.0)) throw std::invalid_argument("need |detuning| < 1");
}

TimeScales scales_with_defect(int n_center, double delta) {
  return time_scales(EnergyModel::quantum_defect(delta), static_cast<double>(n_center));
}

TimeScales scales_with_detuning(int n_center, double detuning) {
  return time_scales(EnergyModel::hydrogen(), n_center + detuning);
}

LevelShiftProfile level_shift_profile(int n_lo, int n_hi, double delta, double global_shift) {
  if (n_hi < n_lo) throw std::invalid_argument("empty level range");
  const auto hydrogen = EnergyModel::hydrogen();
  const auto defect = EnergyModel::quantum_defect(delta, global_shift);
  LevelShiftProfile out;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double eh = energy(hydrogen, n);
    const double ed = energy(defect, n);
    // Difference taken in closed form, free of cancellation between the two
    // level energies: a rigid shift then gives exactly equal d_n.
    const double m = n - delta;
    const double d = delta * (delta - 2.0 * n) / (2.0 * n * n * m * m) + global_shift;
    out.rows.push_back(LevelShiftRow{n, eh, ed, d});
  }
  const auto [lo, hi] = std::minmax_element(out.rows.begin(), out.rows.end(),
                                            [](const auto& a, const auto& b) { return a.d_n < b.d_n; });
  out.spread = hi->d_n - lo->d_n;
  return out;
}

std::string level_shift_csv(const LevelShiftProfile& profile) {
  std::string out = "n,e_hydrogen,e_defect,d_n\n";
  for (const auto& row : profile.rows) {
    out += std::to_string(row.n);
    out += ',';
    const double rest[] = {row.e_hydrogen, row.e_defect, row.d_n};
    out += csv::format_row(rest);
  }
  return out;
}

bool RevivalComparison::identical() const {
  if (unmatched != 0 || max_shift_ns != 0.0 || max_height_difference != 0.0) return false;
  return detuned_report.peaks.size() == defect_report.peaks.size();
}

RevivalComparison compare_revival_structure(const ComparisonConfig& cfg) {
  cfg.validate();
  RevivalComparison out;
  out.detuned = PacketSpec{cfg.n_center + cfg.detuning, cfg.sigma, cfg.window, EnergyModel::hydrogen()};
  out.defect = PacketSpec{static_cast<double>(cfg.n_center), cfg.sigma, cfg.window,
                          EnergyModel::quantum_defect(cfg.delta)};
  out.detuned_scales = time_scales(out.detuned.model, out.detuned.center);
  out.defect_scales = time_scales(out.defect.model, out.defect.center);

  auto run = [&](const PacketSpec& spec, const TimeScales& scales) {
    return classify(autocorr_exact(spec, cfg.grid), scales, cfg.classify);
  };
  auto detuned = std::async(std::launch::async, run, std::cref(out.detuned), std::cref(out.detuned_scales));
  out.defect_report = run(out.defect, out.defect_scales);
  out.detuned_report = detuned.get();

  const double t_cl = au_to_ns(out.detuned_scales.t_cl).value;
  const auto& a = out.detuned_report;
  const auto& b = out.defect_report;
  const std::size_t count = std::min(a.predictions.size(), b.predictions.size());
  for (std::size_t j = 0; j < count; ++j) {
    const Match* ma = a.match_for(j);
    const Match* mb = b.match_for(j);
    if (!ma && !mb) continue;
    if (!ma || !mb) {
      ++out.unmatched;
      continue;
    }
    const double dt = std::abs(a.peaks[ma->peak].t_ns - b.peaks[mb->peak].t_ns);
    out.max_shift_ns = std::max(out.max_shift_ns, dt);
    out.max_shift_cl = std::max(out.max_shift_cl, dt / t_cl);
    out.max_height_difference = std::max(
        out.max_height_difference, std::abs(a.peaks[ma->peak].height - b.peaks[mb->peak].height));
    if (a.predictions[j].kind == RevivalKind::Revival) out.revival_shift_ns = dt;
  }
  return out;
}

std::string format_comparison_records(const RevivalComparison& cmp) {
  std::string out;
  const std::size_t count = std::min(cmp.detuned_report.predictions.size(),
                                     cmp.defect_report.predictions.size());
  for (std::size_t j = 0; j < count; ++j) {
    const auto& p = cmp.detuned_report.predictions[j];
    out += "compare label=" + prediction_token(p) + " q=" + std::to_string(p.q) + " t_pred_ns=" + csv::format_double(p.t_pred_ns);
    auto field = [&](const char* name, const RevivalReport& r) {
      out += std::string(" ") + name + "_t_ns=";
      if (const Match* m = r.match_for(j)) {
        out += csv::format_double(r.peaks[m->peak].t_ns) + " " + name +
               "_height=" + csv::format_double(r.peaks[m->peak].height);
      } else {
        out += "none " + std::string(name) + "_height=none";
      }
    };
    field("detuned", cmp.detuned_report);
    field("defect", cmp.defect_report);
    out += '\n';
  }
  out += "summary max_shift_ns=" + csv::format_double(cmp.max_shift_ns) +
         " max_shift_cl=" + csv::format_double(cmp.max_shift_cl) +
         " max_height_difference=" + csv::format_double(cmp.max_height_difference) +
         " unmatched=" + std::to_string(cmp.unmatched) +
         " metric=" + csv::format_double(cmp.metric()) + '\n';
  return out;
}

} // namespace rydberg
