#include "rydberg/packet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "rydberg/csv.hpp"
#include "rydberg/summation.hpp"

namespace rydberg {

namespace {

constexpr long double kTwoPiL = 2.0L * std::numbers::pi_v<long double>;

// exp(-2 pi i cycles), with the integer part of `cycles` dropped first.
std::complex<double> phasor(long double cycles) {
  const long double frac = cycles - std::floor(cycles);
  const double angle = static_cast<double>(kTwoPiL * frac);
  return {std::cos(angle), -std::sin(angle)};
}

long double to_atomic(double t_ns) {
  return static_cast<long double>(t_ns) / static_cast<long double>(kNsPerAtomicTime);
}

template <class SampleFn>
AutocorrTrace evaluate_grid(const TimeGrid& grid, unsigned threads, SampleFn&& sample) {
  AutocorrTrace trace;
  trace.t_start_ns = grid.start_ns;
  trace.t_end_ns = grid.end_ns;
  const std::size_t count = grid.size();
  trace.samples.resize(count);

  auto fill = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double t = grid.at(i);
      const std::complex<double> a = sample(t);
      trace.samples[i] = TraceSample{t, a, std::norm(a)};
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    fill(0, count);
    return trace;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fill, lo, hi);
  }
  return trace;
}

} // namespace

int PacketSpec::resolved_window() const {
  return window ? *window : static_cast<int>(std::ceil(5.0 * sigma));
}

int PacketSpec::central_level() const { return static_cast<int>(std::lround(center)); }

std::size_t TimeGrid::size() const {
  if (!(step_ns > 0.0) || !std::isfinite(step_ns))
    throw std::invalid_argument("grid step must be positive");
  if (!std::isfinite(start_ns) || !std::isfinite(end_ns) || end_ns < start_ns)
    throw std::invalid_argument("grid end must not precede its start");
  // Tolerate an end point that sits a rounding error beyond the last step.
  const double span = (end_ns - start_ns) / step_ns;
  return static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
}

double AutocorrTrace::step_ns() const {
  if (samples.size() < 2) return 0.0;
  return (samples.back().t_ns - samples.front().t_ns) / static_cast<double>(samples.size() - 1);
}

std::vector<PacketComponent> gaussian_weights(const PacketSpec& spec) {
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("packet width sigma must be positive");
  const int w = spec.resolved_window();
  if (w < 0) throw std::invalid_argument("packet window must be non-negative");
  const int n0 = spec.central_level();
  if (n0 - w < 1) throw std::invalid_argument("packet window reaches below n = 1");
  if (!(spec.model.effective(n0 - w) > 0.0))
    throw std::invalid_argument("packet window reaches levels with n - delta <= 0");

  std::vector<PacketComponent> out;
  std::vector<double> raw;
  for (int k = -w; k <= w; ++k) {
    const double x = (n0 + k) - spec.center;
    raw.push_back(std::exp(-x * x / (2.0 * spec.sigma * spec.sigma)));
  }
  const double total = pairwise_sum<double>(raw);
  for (int k = -w; k <= w; ++k)
    out.push_back(PacketComponent{n0 + k, k, raw[static_cast<std::size_t>(k + w)] / total});
  return out;
}

std::complex<double> amplitude_exact(const std::vector<PacketComponent>& components,
                                     const EnergyModel& model, double t_ns) {
  const long double t_au = to_atomic(t_ns);
  std::vector<std::complex<double>> terms;
  terms.reserve(components.size());
  for (const auto& c : components) {
    const long double cycles = static_cast<long double>(energy(model, c.n)) * t_au / kTwoPiL;
    terms.push_back(c.weight * phasor(cycles));
  }
  return pairwise_sum<std::complex<double>>(terms);
}

AutocorrTrace autocorr_exact(const PacketSpec& spec, const TimeGrid& grid, unsigned threads) {
  const auto components = gaussian_weights(spec);
  return evaluate_grid(grid, threads, [&](double t) {
    return amplitude_exact(components, spec.model, t);
  });
}

AutocorrTrace autocorr_third_order(const PacketSpec& spec, const TimeGrid& grid,
                                   unsigned threads) {
  const auto components = gaussian_weights(spec);
  const TimeScales scales = time_scales(spec.model, spec.center);

  // Cycle rate of each component, in cycles per atomic time unit.
  std::vector<long double> rate;
  for (const auto& c : components) {
    const long double x = static_cast<long double>(c.n) - static_cast<long double>(spec.center);
    rate.push_back(x / scales.t_cl.value - x * x / scales.t_rev.value +
                   x * x * x / scales.t_sr.value);
  }

  return evaluate_grid(grid, threads, [&](double t) {
    const long double t_au = to_atomic(t);
    std::vector<std::complex<double>> terms;
    terms.reserve(components.size());
    for (std::size_t i = 0; i < components.size(); ++i)
      terms.push_back(components[i].weight * phasor(rate[i] * t_au));
    return pairwise_sum<std::complex<double>>(terms);
  });
}

std::string trace_to_csv(const AutocorrTrace& trace) {
  std::string out = "t_ns,re_a,im_a,abs2\n";
  for (const auto& s : trace.samples) {
    const double row[] = {s.t_ns, s.amplitude.real(), s.amplitude.imag(), s.abs2};
    out += csv::format_row(row);
  }
  return out;
}

AutocorrTrace trace_from_csv(const std::string& text) {
  const auto lines = csv::split_lines(text);
  if (lines.empty() || lines.front() != "t_ns,re_a,im_a,abs2")
    throw std::invalid_argument("trace CSV must start with header t_ns,re_a,im_a,abs2");
  AutocorrTrace trace;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = csv::split_fields(lines[i]);
    if (fields.size() != 4)
      throw std::invalid_argument("trace CSV line " + std::to_string(i + 1) +
                                  ": expected 4 fields");
    trace.samples.push_back(TraceSample{csv::parse_double(fields[0]),
                                        {csv::parse_double(fields[1]), csv::parse_double(fields[2])},
                                        csv::parse_double(fields[3])});
  }
  if (!trace.samples.empty()) {
    trace.t_start_ns = trace.samples.front().t_ns;
    trace.t_end_ns = trace.samples.back().t_ns;
  }
  return trace;
}

} // namespace rydberg
