#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rydberg/packet.hpp"
#include "rydberg/revival.hpp"

using namespace rydberg;

namespace {

AutocorrTrace synthetic(double start, double end, double step, auto&& f) {
  AutocorrTrace trace;
  trace.t_start_ns = start;
  trace.t_end_ns = end;
  const TimeGrid grid{start, end, step};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.at(i);
    const double v = f(t);
    trace.samples.push_back(TraceSample{t, {std::sqrt(v), 0.0}, v});
  }
  return trace;
}

PacketSpec reference_spec() { return PacketSpec{48.0, 1.5, 8, EnergyModel::hydrogen()}; }

const AutocorrTrace& reference_trace() {
  static const AutocorrTrace trace = autocorr_exact(reference_spec(), TimeGrid{0.0, 4.0, 2e-4});
  return trace;
}

TimeScales scales48() { return time_scales(EnergyModel::hydrogen(), 48.0); }

double t_cl_ns() { return au_to_ns(scales48().t_cl).value; }

} // namespace

TEST_CASE("prediction table") {
  const auto p = predict_superrevivals(scales48(), 12);
  REQUIRE(p.size() == 4);
  const double t_rev = au_to_ns(scales48().t_rev).value;
  CHECK(p[0].q == 3);
  CHECK(p[0].t_frac_pred_ns == doctest::Approx(t_rev).epsilon(1e-15));
  CHECK(p[1].kind == RevivalKind::Superrevival);
  CHECK(p[1].t_pred_ns == doctest::Approx(3.23).epsilon(1e-3));
  CHECK(p[1].t_frac_pred_ns == doctest::Approx(0.5 * t_rev).epsilon(1e-15));
  CHECK(p[1].t_frac_pred_ns == doctest::Approx(0.269).epsilon(1e-3));
  CHECK(p[3].t_pred_ns == doctest::Approx(1.61).epsilon(3e-3));
  CHECK(p[3].t_frac_pred_ns == doctest::Approx(0.25 * t_rev).epsilon(1e-15));
  CHECK(p[2].kind == RevivalKind::FractionalSuperrevival);
  CHECK(predict_superrevivals(scales48(), 5).size() == 1);
  CHECK_THROWS_AS(predict_superrevivals(scales48(), 2), std::invalid_argument);
}

TEST_CASE("predicted times scale as the fifth power of the centre") {
  const auto a = predict_superrevivals(time_scales(EnergyModel::hydrogen(), 30.0), 12);
  const auto b = predict_superrevivals(time_scales(EnergyModel::hydrogen(), 60.0), 12);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ratio = a[i].t_pred_ns / b[i].t_pred_ns;
    CHECK(std::abs(ratio - std::pow(0.5, 5)) <= 1e-12 * std::pow(0.5, 5));
  }
}

TEST_CASE("constant and empty traces have no peaks") {
  const auto flat = synthetic(0.0, 1.0, 1e-3, [](double) { return 0.6; });
  CHECK(detect_peaks(flat, {}).empty());
  CHECK(detect_peaks(AutocorrTrace{}, {}).empty());
  PacketSpec single = reference_spec();
  single.window = 0;
  const auto trace = autocorr_exact(single, TimeGrid{0.0, 1.0, 1e-3});
  for (const auto& s : trace.samples) CHECK(s.abs2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(detect_peaks(trace, {}).empty());
}

TEST_CASE("threshold is strict") {
  const auto trace = synthetic(0.0, 1.0, 1e-3, [](double t) { return t == 0.5 ? 0.1 : 0.05; });
  CHECK(detect_peaks(trace, PeakOptions{0.1, 0.0}).empty());
  CHECK(detect_peaks(trace, PeakOptions{0.09, 0.0}).size() == 1);
}

TEST_CASE("non-uniform sampling is rejected") {
  auto trace = synthetic(0.0, 1.0, 0.1, [](double t) { return t; });
  trace.samples[4].t_ns += 0.03;
  CHECK_THROWS_AS(detect_peaks(trace, {}), std::invalid_argument);
}

TEST_CASE("parabolic refinement recovers an off-grid peak") {
  const double centre = 0.41237;
  const auto trace =
      synthetic(0.0, 1.0, 1e-3, [&](double t) { return 0.9 - 20.0 * (t - centre) * (t - centre); });
  const auto peaks = detect_peaks(trace, {});
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].t_ns == doctest::Approx(centre).epsilon(1e-9));
  CHECK(peaks[0].height == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("greedy thinning keeps the tallest peak") {
  const auto trace = synthetic(0.0, 1.0, 1e-3, [](double t) {
    return 0.5 + 0.3 * std::cos(2 * std::numbers::pi * t / 0.05) * std::exp(-std::pow(t - 0.5, 2));
  });
  const auto all = detect_peaks(trace, PeakOptions{0.1, 0.0});
  const auto thin = detect_peaks(trace, PeakOptions{0.1, 0.12});
  CHECK(thin.size() < all.size());
  for (std::size_t i = 1; i < thin.size(); ++i) CHECK(thin[i].t_ns - thin[i - 1].t_ns >= 0.12);
  CHECK(std::any_of(thin.begin(), thin.end(), [](const Peak& p) { return std::abs(p.t_ns - 0.5) < 1e-6; }));
}

TEST_CASE("local period of a pure cosine") {
  for (double period : {0.05, 0.1345, 0.269}) {
    const auto trace = synthetic(0.0, 2.0, 1e-3, [&](double t) {
      return 0.5 + 0.5 * std::cos(2 * std::numbers::pi * t / period);
    });
    const auto p = local_period(trace, 1.0, 1.5, {});
    REQUIRE(p.has_value());
    CHECK(std::abs(*p - period) < 1e-3);
  }
}

TEST_CASE("local period needs three peaks") {
  const auto trace = synthetic(0.0, 1.0, 1e-3, [](double t) {
    return 0.5 + 0.5 * std::cos(2 * std::numbers::pi * t / 0.4);
  });
  CHECK_FALSE(local_period(trace, 0.5, 0.5, {}).has_value());
  CHECK_FALSE(local_period(trace, 0.5, 0.0, {}).has_value());
}

TEST_CASE("peak times are stable under doubling the grid density") {
  const auto coarse = autocorr_exact(reference_spec(), TimeGrid{0.0, 4.0, 4e-4});
  const auto fine = autocorr_exact(reference_spec(), TimeGrid{0.0, 4.0, 2e-4});
  const PeakOptions opts{0.1, 0.4 * t_cl_ns()};
  const auto a = detect_peaks(coarse, opts);
  const auto b = detect_peaks(fine, opts);
  // Thinning is ill-conditioned for a neighbour right at the separation
  // limit or a near tie in height with a suppressed rival; compare the tall
  // peaks clear of both.
  const double margin = opts.min_separation_ns + 2 * 4e-4;
  const auto candidates = detect_peaks(coarse, PeakOptions{0.1, 0.0});
  auto has_rival = [&](const Peak& p) {
    return std::any_of(candidates.begin(), candidates.end(), [&](const Peak& q) {
      return q.t_ns != p.t_ns && std::abs(q.t_ns - p.t_ns) < margin && std::abs(q.height - p.height) < 0.02;
    });
  };
  std::size_t compared = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& p = a[i];
    if (p.height < 0.3) continue;
    if (i > 0 && p.t_ns - a[i - 1].t_ns < margin) continue;
    if (i + 1 < a.size() && a[i + 1].t_ns - p.t_ns < margin) continue;
    if (has_rival(p)) continue;
    const auto it = std::min_element(b.begin(), b.end(), [&](const Peak& x, const Peak& y) {
      return std::abs(x.t_ns - p.t_ns) < std::abs(y.t_ns - p.t_ns);
    });
    CHECK(std::abs(it->t_ns - p.t_ns) < 4e-4);
    ++compared;
  }
  CHECK(compared > 50);
}

TEST_CASE("reference trace has a peak near the superrevival anchor") {
  const auto peaks = detect_peaks(reference_trace(), PeakOptions{0.1, 0.4 * t_cl_ns()});
  CHECK(std::any_of(peaks.begin(), peaks.end(), [](const Peak& p) { return std::abs(p.t_ns - 3.23) <= 0.02; }));
  for (std::size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i].t_ns > peaks[i - 1].t_ns);
  for (const auto& p : peaks) {
    CHECK(p.height > 0.0);
    CHECK(p.height <= 1.0);
  }
}

TEST_CASE("fractional superrevival periods") {
  PeriodOptions opts;
  opts.cluster_radius_ns = 3.0 * t_cl_ns();
  const double t_rev = au_to_ns(scales48().t_rev).value;
  const auto p12 = local_period(reference_trace(), 1.61, 0.6, opts);
  const auto p6 = local_period(reference_trace(), 3.23, 1.0, opts);
  REQUIRE(p12.has_value());
  REQUIRE(p6.has_value());
  CHECK(std::abs(*p12 / (0.25 * t_rev) - 1.0) < 0.1);
  CHECK(std::abs(*p6 / (0.5 * t_rev) - 1.0) < 0.1);
}

TEST_CASE("classification of the reference trace") {
  const auto report = classify(reference_trace(), scales48(), {});
  CHECK(report.predictions.size() == 5);
  const Match* rev = report.match_for(RevivalKind::Revival);
  const Match* sr = report.match_for(RevivalKind::Superrevival, 6);
  REQUIRE(rev != nullptr);
  REQUIRE(sr != nullptr);
  CHECK(std::abs(report.peaks[rev->peak].t_ns - 0.538) < 0.03);
  CHECK(std::abs(report.peaks[sr->peak].t_ns - 3.23) < 0.06);
  CHECK(report.superrevival_exceeds_revival() == std::optional<bool>(true));
  CHECK(report.match_for(RevivalKind::FractionalSuperrevival, 3) == nullptr);
  for (const auto& m : report.matches)
    CHECK(std::abs(m.residual_ns) < 0.05 * report.predictions[m.prediction].t_pred_ns);
  const auto& sr_peak = report.peaks[sr->peak];
  REQUIRE(sr_peak.local_period_ns.has_value());
  CHECK(*sr_peak.local_period_ns == doctest::Approx(report.predictions[sr->prediction].t_frac_pred_ns).epsilon(0.1));
}

TEST_CASE("classify is deterministic") {
  const auto a = classify(reference_trace(), scales48(), {});
  const auto b = classify(reference_trace(), scales48(), {});
  CHECK(format_report_records(a) == format_report_records(b));
  CHECK(format_report_table(a) == format_report_table(b));
}

TEST_CASE("third-order trace classifies like the exact trace") {
  const auto third = autocorr_third_order(reference_spec(), TimeGrid{0.0, 4.0, 2e-4});
  const auto a = classify(reference_trace(), scales48(), {});
  const auto b = classify(third, scales48(), {});
  CHECK(a.matched_labels() == b.matched_labels());
  CHECK(b.superrevival_exceeds_revival() == std::optional<bool>(true));
}

TEST_CASE("empty trace gives an empty report") {
  const auto report = classify(AutocorrTrace{}, scales48(), {});
  CHECK(report.empty());
  CHECK(report.matches.empty());
  CHECK_FALSE(report.superrevival_exceeds_revival().has_value());
  const auto records = format_report_records(report);
  CHECK(records.find("status=absent") != std::string::npos);
  CHECK(records.find("status=matched") == std::string::npos);
}

TEST_CASE("record format") {
  const auto report = classify(reference_trace(), scales48(), {});
  const auto records = format_report_records(report);
  CHECK(records.find("label=superrevival q=6 ") != std::string::npos);
  CHECK(records.find("prediction label=revival q=0 ") != std::string::npos);
  CHECK(records.find("prediction label=fractional-superrevival q=12 ") != std::string::npos);
  CHECK(records.back() == '\n');
  CHECK(format_report_table(report).find("superrevival taller than revival: yes") != std::string::npos);
}
