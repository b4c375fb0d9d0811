#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "rydberg/csv.hpp"
#include "rydberg/defectlab.hpp"
#include "rydberg/error.hpp"
#include "rydberg/packet.hpp"
#include "rydberg/revival.hpp"
#include "rydberg/spectrum.hpp"
#include "rydberg/squeezed.hpp"
#include "rydberg/units.hpp"

namespace rydberg::cli {

namespace {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

// Emit to --out when given, to stdout otherwise.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) out << content;
  else write_file(path, content);
}

std::string approx(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string num(double v) { return csv::format_double(v); }

struct PacketArgs {
  double nbar = 48.0;
  double sigma = 1.5;
  int window = -1;
  double delta = 0.0;
  double detuning = 0.0;
  double t_start_ns = 0.0;
  double t_end_ns = 4.0;
  double step_ns = 2e-4;
  unsigned threads = 1;

  EnergyModel model() const {
    return delta > 0.0 ? EnergyModel::quantum_defect(delta) : EnergyModel::hydrogen();
  }
  double center() const { return nbar + detuning; }
  PacketSpec spec() const {
    PacketSpec s{center(), sigma, std::nullopt, model()};
    if (window >= 0) s.window = window;
    return s;
  }
  TimeGrid grid() const {
    if (!(step_ns > 0.0)) throw std::invalid_argument("--grid-step-ns must be positive");
    if (!(t_end_ns > t_start_ns)) throw std::invalid_argument("--t-end-ns must exceed --t-start-ns");
    return TimeGrid{t_start_ns, t_end_ns, step_ns};
  }
};

void add_center_options(CLI::App* cmd, PacketArgs& a) {
  cmd->add_option("--nbar", a.nbar, "Central principal quantum number")->capture_default_str();
  cmd->add_option("--delta", a.delta, "Quantum defect (0 = hydrogen)")->capture_default_str();
  cmd->add_option("--detuning", a.detuning, "Centre offset in units of n")->capture_default_str();
}

void add_packet_options(CLI::App* cmd, PacketArgs& a) {
  add_center_options(cmd, a);
  cmd->add_option("--sigma", a.sigma, "Gaussian width in n")->capture_default_str();
  cmd->add_option("--window", a.window, "Half-width W of retained levels (default ceil(5 sigma))");
  cmd->add_option("--t-start-ns", a.t_start_ns, "Grid start (ns)")->capture_default_str();
  cmd->add_option("--t-end-ns", a.t_end_ns, "Grid end (ns)")->capture_default_str();
  cmd->add_option("--grid-step-ns", a.step_ns, "Grid step (ns)")->capture_default_str();
  cmd->add_option("--threads", a.threads, "Worker threads for trace evaluation")->capture_default_str();
}

// ---------------------------------------------------------------------------

void cmd_timescales(const PacketArgs& a, int q_max, const std::string& out_path, std::ostream& out) {
  const TimeScales s = time_scales(a.model(), a.center());
  const double cl = au_to_ns(s.t_cl).value;
  const double rev = au_to_ns(s.t_rev).value;
  const double sr = au_to_ns(s.t_sr).value;

  std::ostringstream os;
  os << "# time scales, " << (a.delta > 0.0 ? "quantum-defect" : "hydrogen") << " spectrum"
     << ", centre " << num(a.center()) << ", delta " << num(a.delta) << "\n";
  os << "scale,au,ns\n";
  os << "T_cl," << num(s.t_cl.value) << "," << num(cl) << "\n";
  os << "t_rev," << num(s.t_rev.value) << "," << num(rev) << "\n";
  os << "t_sr," << num(s.t_sr.value) << "," << num(sr) << "\n";
  os << "t_rev/T_cl = " << num(s.t_rev / s.t_cl) << "\n";
  os << "t_sr/t_rev = " << num(s.t_sr / s.t_rev) << "\n";
  os << "T_cl ≈ " << approx(cl) << " ns\n";
  os << "t_rev ≈ " << approx(rev) << " ns\n";
  os << "t_sr ≈ " << approx(sr) << " ns\n";
  os << "q,t_sr/q_ns,T_frac_ns\n";
  const auto preds = predict_superrevivals(s, q_max);
  for (const auto& p : preds) os << p.q << "," << num(p.t_pred_ns) << "," << num(p.t_frac_pred_ns) << "\n";
  for (const auto& p : preds)
    os << "t_sr/" << p.q << " ≈ " << approx(p.t_pred_ns) << " ns (T_frac ≈ " << approx(p.t_frac_pred_ns)
       << " ns)\n";
  emit(out_path, os.str(), out);
}

AutocorrTrace compute_trace(const PacketArgs& a, const std::string& model) {
  if (model == "exact") return autocorr_exact(a.spec(), a.grid(), a.threads);
  if (model == "third-order") return autocorr_third_order(a.spec(), a.grid(), a.threads);
  throw std::invalid_argument("--model must be 'exact' or 'third-order'");
}

void cmd_autocorr(const PacketArgs& a, const std::string& model, const std::string& out_path,
                  std::ostream& out) {
  emit(out_path, trace_to_csv(compute_trace(a, model)), out);
}

void cmd_revivals(const PacketArgs& a, const std::string& model, const std::string& input,
                  const ClassifyOptions& opts, const std::string& out_path, std::ostream& out) {
  AutocorrTrace trace;
  if (!input.empty()) {
    const std::string text = read_file(input);
    if (!trim(text).empty()) trace = trace_from_csv(text);
  } else {
    trace = compute_trace(a, model);
  }
  const TimeScales scales = time_scales(a.model(), a.center());
  const RevivalReport report = classify(trace, scales, opts);

  std::ostringstream os;
  if (report.empty()) os << "no peaks detected\n";
  os << format_report_table(report);
  const std::string records = format_report_records(report);
  if (out_path.empty()) {
    os << "\n" << records;
  } else {
    write_file(out_path, records);
  }
  out << os.str();
}

struct SqueezedArgs {
  int nbar = 48;
  int l = 1;
  double tol = 1e-10;
  double alpha_lo = 0.6;
  double alpha_hi = 0.0; // 4 n_bar when unset
  int levels = 12;
  bool evolve = false;
  double t_start_ns = 0.0;
  double t_end_ns = -1.0; // 2 T_cl when unset
  double step_ns = 2e-4;
};

void cmd_squeezed(const SqueezedArgs& a, const std::string& out_path, std::ostream& out) {
  const auto cond = SqueezedFitConditions::for_level(a.nbar, a.l);
  SqueezedSolveOptions solve;
  solve.tol = a.tol;
  solve.alpha_lo = a.alpha_lo;
  solve.alpha_hi = a.alpha_hi;
  const RadialSqueezedState state = solve_parameters(cond, solve);
  const auto m = moments(state);
  const auto res = condition_residuals(state, cond);

  std::ostringstream os;
  os << "# radial squeezed state, n_bar " << a.nbar << ", l " << a.l << "\n";
  os << "r_out = " << num(cond.r_out) << "\n";
  os << "E_target = " << num(cond.e_target) << "\n";
  os << "alpha = " << num(state.alpha()) << "\n";
  os << "gamma0 = " << num(state.gamma0()) << "\n";
  os << "gamma1 = " << num(state.gamma1()) << "\n";
  os << "residual p_r = " << num(res.p_r) << "\n";
  os << "residual r = " << num(res.r) << "\n";
  os << "residual H = " << num(res.energy) << "\n";
  os << "residuals below tolerance " << num(a.tol) << ": " << (res.max() < a.tol ? "yes" : "no") << "\n";
  os << "delta_r = " << num(m.delta_r()) << "\n";
  os << "delta_p = " << num(m.delta_p()) << "\n";
  os << "uncertainty product t=0 = " << num(m.uncertainty_product()) << "\n";
  os << "uncertainty product analytic = " << num(analytic_uncertainty_product(state.alpha())) << "\n";

  if (a.evolve) {
    const int lo = std::max(a.l + 1, a.nbar - a.levels);
    const auto expansion = expand_in_eigenbasis(state, lo, a.nbar + a.levels, a.l);
    const auto evolved = evolve(expansion, EnergyModel::hydrogen());
    const double t_cl_ns = au_to_ns(time_scales(EnergyModel::hydrogen(), a.nbar).t_cl).value;
    const double t_end = a.t_end_ns > 0.0 ? a.t_end_ns : 2.0 * t_cl_ns;
    if (!(a.step_ns > 0.0)) throw std::invalid_argument("--grid-step-ns must be positive");
    if (!(t_end > a.t_start_ns)) throw std::invalid_argument("--t-end-ns must exceed --t-start-ns");
    const auto samples = uncertainty_trace(evolved, TimeGrid{a.t_start_ns, t_end, a.step_ns});

    const auto [lo_it, hi_it] = std::minmax_element(
        samples.begin(), samples.end(),
        [](const auto& x, const auto& y) { return x.product() < y.product(); });
    os << "levels = " << expansion.n.front() << ".." << expansion.n.back() << "\n";
    os << "captured probability = " << num(expansion.captured_probability()) << "\n";
    os << "dominant level = " << expansion.dominant_level() << "\n";
    os << "eigenbasis uncertainty product t=" << num(samples.front().t_ns)
       << " = " << num(samples.front().product()) << "\n";
    os << "uncertainty product min = " << num(lo_it->product()) << " at t_ns = " << num(lo_it->t_ns) << "\n";
    os << "uncertainty product max = " << num(hi_it->product()) << " at t_ns = " << num(hi_it->t_ns) << "\n";
    os << "uncertainty product non-constant: "
       << (hi_it->product() - lo_it->product() > 1e-9 * hi_it->product() ? "yes" : "no") << "\n";
    const std::string csv_text = uncertainty_to_csv(samples);
    if (out_path.empty()) os << "\n" << csv_text;
    else write_file(out_path, csv_text);
  }
  out << os.str();
}

struct DefectArgs {
  int n = 48;
  double delta = 0.5;
  std::optional<double> detuning;
  int levels_lo = 0;
  int levels_hi = 0;
  double sigma = 1.5;
  int window = -1;
  double t_end_ns = 4.0;
  double step_ns = 2e-4;
  int q_max = 12;
};

bool scales_equal(const TimeScales& a, const TimeScales& b) {
  auto close = [](TimeAu x, TimeAu y) { return std::abs(x.value - y.value) <= 1e-12 * std::abs(y.value); };
  return close(a.t_cl, b.t_cl) && close(a.t_rev, b.t_rev) && close(a.t_sr, b.t_sr);
}

void cmd_defect(const DefectArgs& a, const std::string& out_path, std::ostream& out) {
  const double detuning = a.detuning.value_or(-a.delta);
  ComparisonConfig cfg;
  cfg.n_center = a.n;
  cfg.delta = a.delta;
  cfg.detuning = detuning;
  cfg.sigma = a.sigma;
  if (a.window >= 0) cfg.window = a.window;
  if (!(a.step_ns > 0.0) || !(a.t_end_ns > 0.0))
    throw std::invalid_argument("grid step and end must be positive");
  cfg.grid = TimeGrid{0.0, a.t_end_ns, a.step_ns};
  cfg.classify.q_max = a.q_max;
  cfg.validate();

  const TimeScales defect = scales_with_defect(a.n, a.delta);
  const TimeScales detuned = scales_with_detuning(a.n, detuning);
  const bool equal_scales = scales_equal(defect, detuned);
  const bool identical_spectra = a.delta == 0.0;

  const int lo = a.levels_lo > 0 ? a.levels_lo : std::max(1, a.n - 4);
  const int hi = a.levels_hi > 0 ? a.levels_hi : a.n + 4;
  const auto profile = level_shift_profile(lo, hi, a.delta);

  std::ostringstream os;
  os << "# quantum defect vs detuning, n " << a.n << ", delta " << num(a.delta) << ", detuning "
     << num(detuning) << "\n";
  os << "effective centre (defect) = " << num(a.n - a.delta) << "\n";
  os << "effective centre (detuning) = " << num(a.n + detuning) << "\n";
  os << "scale,defect_ns,detuning_ns\n";
  os << "T_cl," << num(au_to_ns(defect.t_cl).value) << "," << num(au_to_ns(detuned.t_cl).value) << "\n";
  os << "t_rev," << num(au_to_ns(defect.t_rev).value) << "," << num(au_to_ns(detuned.t_rev).value) << "\n";
  os << "t_sr," << num(au_to_ns(defect.t_sr).value) << "," << num(au_to_ns(detuned.t_sr).value) << "\n";
  os << "level shift spread = " << num(profile.spread) << " (levels " << lo << ".." << hi << ")\n";

  std::string verdict;
  if (equal_scales && identical_spectra) verdict = "identical spectra";
  else if (equal_scales) verdict = "time scales equal, spectra differ";
  else if (identical_spectra) verdict = "time scales differ, identical spectra";
  else verdict = "time scales differ, spectra differ";
  os << "verdict: " << verdict << "\n";

  const auto cmp = compare_revival_structure(cfg);
  os << "revival comparison (detuned hydrogen vs on-resonance defect):\n";
  os << format_comparison_records(cmp);
  out << os.str();
  if (!out_path.empty()) write_file(out_path, level_shift_csv(profile));
}

// Splice `--key=value` pairs from any --config file in front of the user's
// own arguments so that command-line flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> user;
  std::vector<std::string> injected;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config requires a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      user.push_back(args[i]);
      continue;
    }
    const auto extra = read_config_args(path);
    injected.insert(injected.end(), extra.begin(), extra.end());
  }
  if (injected.empty() || user.empty()) return user;
  std::vector<std::string> out{user.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), user.begin() + 1, user.end());
  return out;
}

} // namespace

std::vector<std::string> read_config_args(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rydberg wave-packet revival toolkit", "rydberg"};
  app.option_defaults()->take_last();
  app.require_subcommand(1);
  std::string config_path; // consumed by expand_config, declared for --help

  std::string out_path;
  int q_max = 12;
  std::string model = "exact";

  PacketArgs ts_args;
  auto* ts = app.add_subcommand("timescales", "Classical, revival and superrevival time scales");
  add_center_options(ts, ts_args);
  ts->add_option("--q-max", q_max, "Largest q for t_sr/q")->capture_default_str();
  ts->add_option("--out", out_path, "Write the report to PATH");

  PacketArgs ac_args;
  auto* ac = app.add_subcommand("autocorr", "Autocorrelation trace as CSV");
  add_packet_options(ac, ac_args);
  ac->add_option("--model", model, "exact | third-order")->capture_default_str();
  ac->add_option("--out", out_path, "Write the CSV to PATH");

  PacketArgs rv_args;
  ClassifyOptions rv_opts;
  std::string input;
  auto* rv = app.add_subcommand("revivals", "Detect and classify revivals and superrevivals");
  add_packet_options(rv, rv_args);
  rv->add_option("--model", model, "exact | third-order")->capture_default_str();
  rv->add_option("--input", input, "Analyse a trace CSV instead of computing one");
  rv->add_option("--q-max", rv_opts.q_max, "Largest q for t_sr/q predictions")->capture_default_str();
  rv->add_option("--min-height", rv_opts.min_height, "Peak height threshold")->capture_default_str();
  rv->add_option("--match-tol", rv_opts.match_tolerance, "Match tolerance (fraction of t_pred)")
      ->capture_default_str();
  rv->add_option("--out", out_path, "Write the structured records to PATH");

  SqueezedArgs sq_args;
  auto* sq = app.add_subcommand("squeezed", "Fit, expand and evolve a radial squeezed state");
  sq->add_option("--nbar", sq_args.nbar, "Dominant principal quantum number")->capture_default_str();
  sq->add_option("--l", sq_args.l, "Angular momentum")->capture_default_str();
  sq->add_option("--tol", sq_args.tol, "Condition residual tolerance")->capture_default_str();
  sq->add_option("--alpha-lo", sq_args.alpha_lo, "Lower end of the alpha scan")->capture_default_str();
  sq->add_option("--alpha-hi", sq_args.alpha_hi, "Upper end of the alpha scan (default 4 nbar)");
  sq->add_option("--levels", sq_args.levels, "Expansion half-width around nbar")->capture_default_str();
  sq->add_flag("--evolve", sq_args.evolve, "Expand in the eigenbasis and evolve");
  sq->add_option("--t-start-ns", sq_args.t_start_ns, "Evolution start (ns)")->capture_default_str();
  sq->add_option("--t-end-ns", sq_args.t_end_ns, "Evolution end (ns, default 2 T_cl)");
  sq->add_option("--grid-step-ns", sq_args.step_ns, "Evolution step (ns)")->capture_default_str();
  sq->add_option("--out", out_path, "Write the uncertainty CSV to PATH");

  DefectArgs df_args;
  double df_detuning = 0.0;
  auto* df = app.add_subcommand("defect", "Compare quantum defects with laser detuning");
  df->add_option("--n", df_args.n, "Integer resonance level")->capture_default_str();
  df->add_option("--delta", df_args.delta, "Quantum defect")->capture_default_str();
  auto* df_detuning_opt =
      df->add_option("--detuning", df_detuning, "Centre offset in n (default -delta)");
  df->add_option("--levels-lo", df_args.levels_lo, "First level of the shift profile");
  df->add_option("--levels-hi", df_args.levels_hi, "Last level of the shift profile");
  df->add_option("--sigma", df_args.sigma, "Gaussian width in n")->capture_default_str();
  df->add_option("--window", df_args.window, "Half-width W of retained levels");
  df->add_option("--t-end-ns", df_args.t_end_ns, "Grid end (ns)")->capture_default_str();
  df->add_option("--grid-step-ns", df_args.step_ns, "Grid step (ns)")->capture_default_str();
  df->add_option("--q-max", df_args.q_max, "Largest q for t_sr/q predictions")->capture_default_str();
  df->add_option("--out", out_path, "Write the level-shift CSV to PATH");

  for (auto* cmd : {ts, ac, rv, sq, df})
    cmd->add_option("--config", config_path, "key = value file; flags override it");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (df_detuning_opt->count() > 0) df_args.detuning = df_detuning;

    if (ts->parsed()) cmd_timescales(ts_args, q_max, out_path, out);
    else if (ac->parsed()) cmd_autocorr(ac_args, model, out_path, out);
    else if (rv->parsed()) cmd_revivals(rv_args, model, input, rv_opts, out_path, out);
    else if (sq->parsed()) cmd_squeezed(sq_args, out_path, out);
    else if (df->parsed()) cmd_defect(df_args, out_path, out);
    return 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ERROR 1: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "ERROR 2: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "ERROR 1: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "ERROR 1: " << e.what() << "\n";
    return 1;
  }
}

} // namespace rydberg::cli
