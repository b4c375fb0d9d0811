#include "rydberg/squeezed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rydberg/csv.hpp"
#include "rydberg/error.hpp"
#include "rydberg/roots.hpp"
#include "rydberg/special.hpp"
#include "rydberg/summation.hpp"

namespace rydberg {

namespace {

std::complex<double> phase_factor(double energy, TimeAu t) {
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  long double cycles = static_cast<long double>(energy) * t.value / two_pi;
  cycles -= std::floor(cycles);
  const double angle = static_cast<double>(two_pi * cycles);
  return {std::cos(angle), -std::sin(angle)};
}

double gamma0_for(double alpha, double r_out) { return (2.0 * alpha + 3.0) / (2.0 * r_out); }

} // namespace

RadialSqueezedState::RadialSqueezedState(double alpha, double gamma0, double gamma1)
    : alpha_(alpha), gamma0_(gamma0), gamma1_(gamma1) {
  if (!(alpha > 0.5)) throw std::invalid_argument("squeezed state requires alpha > 1/2");
  if (!(gamma0 > 0.0)) throw std::invalid_argument("squeezed state requires gamma0 > 0");
  if (!std::isfinite(gamma1)) throw std::invalid_argument("gamma1 must be finite");
  log_norm_ = 0.5 * ((2.0 * alpha + 3.0) * std::log(2.0 * gamma0) -
                     special::log_gamma(2.0 * alpha + 3.0));
}

double RadialSqueezedState::norm() const { return std::exp(log_norm_); }

std::complex<double> RadialSqueezedState::operator()(double r) const {
  if (!(r > 0.0)) return 0.0;
  const double magnitude = std::exp(log_norm_ + alpha_ * std::log(r) - gamma0_ * r);
  return magnitude * std::complex<double>(std::cos(gamma1_ * r), -std::sin(gamma1_ * r));
}

double SqueezedMoments::delta_r() const { return std::sqrt(std::max(0.0, r2 - r * r)); }
double SqueezedMoments::delta_p() const { return std::sqrt(std::max(0.0, p2 - p * p)); }

SqueezedMoments moments(const RadialSqueezedState& state) {
  const double a2 = 2.0 * state.alpha();
  const double g2 = 2.0 * state.gamma0();
  const double g0 = state.gamma0();
  const double g1 = state.gamma1();
  SqueezedMoments m;
  m.r = (a2 + 3.0) / g2;
  m.r2 = (a2 + 4.0) * (a2 + 3.0) / (g2 * g2);
  m.inv_r = g2 / (a2 + 2.0);
  m.inv_r2 = g2 * g2 / ((a2 + 2.0) * (a2 + 1.0));
  m.p = -g1;
  m.p2 = g1 * g1 + g0 * g0 / (a2 + 1.0);
  return m;
}

double expected_energy(const SqueezedMoments& m, int l) {
  return 0.5 * m.p2 + 0.5 * l * (l + 1.0) * m.inv_r2 - m.inv_r;
}

double analytic_uncertainty_product(double alpha) {
  return 0.5 * std::sqrt((2.0 * alpha + 3.0) / (2.0 * alpha + 1.0));
}

double outer_apsis(int n_bar, int l) {
  const double n2 = static_cast<double>(n_bar) * n_bar;
  const double disc = 1.0 - l * (l + 1.0) / n2;
  if (disc < 0.0) throw std::invalid_argument("no bound Kepler orbit for this n, l");
  return n2 * (1.0 + std::sqrt(disc));
}

SqueezedFitConditions SqueezedFitConditions::for_level(int n_bar, int l) {
  if (n_bar < 2) throw std::invalid_argument("squeezed fit requires n_bar >= 2");
  if (l < 0 || l >= n_bar) throw std::invalid_argument("squeezed fit requires 0 <= l < n_bar");
  return SqueezedFitConditions{n_bar, l, outer_apsis(n_bar, l),
                               -0.5 / (static_cast<double>(n_bar) * n_bar)};
}

double ConditionResiduals::max() const { return std::max({p_r, r, energy}); }

ConditionResiduals condition_residuals(const RadialSqueezedState& state,
                                       const SqueezedFitConditions& cond) {
  const auto m = moments(state);
  return ConditionResiduals{std::abs(m.p), std::abs(m.r - cond.r_out) / cond.r_out,
                            std::abs(expected_energy(m, cond.l) - cond.e_target) /
                                std::abs(cond.e_target)};
}

RadialSqueezedState solve_parameters(const SqueezedFitConditions& cond,
                                     const SqueezedSolveOptions& options) {
  if (!(cond.r_out > 0.0) || !(cond.e_target < 0.0))
    throw std::invalid_argument("fit conditions need r_out > 0 and a bound target energy");
  const double lo = options.alpha_lo;
  const double hi = options.alpha_hi > 0.0 ? options.alpha_hi : 4.0 * cond.n_bar;
  if (!(lo > 0.5) || !(hi > lo)) throw std::invalid_argument("alpha scan needs 1/2 < alpha_lo < alpha_hi");

  auto mismatch = [&](double alpha) {
    const RadialSqueezedState s(alpha, gamma0_for(alpha, cond.r_out), 0.0);
    return expected_energy(moments(s), cond.l) - cond.e_target;
  };

  const auto bracket = scan_bracket(mismatch, lo, hi, options.scan_samples, true);
  if (!bracket) {
    std::ostringstream msg;
    msg << "no sign change of <H> - E on alpha in [" << lo << ", " << hi << "]";
    throw NumericalError(msg.str());
  }
  RootOptions root;
  root.f_tol = 0.25 * options.tol * std::abs(cond.e_target);
  root.x_tol = 1e-15;
  const double alpha = solve_bracketed(mismatch, *bracket, root);

  RadialSqueezedState state(alpha, gamma0_for(alpha, cond.r_out), 0.0);
  const auto res = condition_residuals(state, cond);
  if (!(res.max() < options.tol)) {
    std::ostringstream msg;
    msg << "squeezed fit residual " << res.max() << " exceeds tolerance " << options.tol;
    throw NumericalError(msg.str());
  }
  return state;
}

double EigenExpansion::captured_probability() const {
  std::vector<double> p;
  for (const auto& v : c) p.push_back(std::norm(v));
  return pairwise_sum<double>(p);
}

int EigenExpansion::dominant_level() const {
  if (c.empty()) throw std::logic_error("empty expansion");
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (std::abs(c[i]) > std::abs(c[best])) best = i;
  return n[best];
}

QuadratureRule expansion_rule(const RadialSqueezedState& state, int n_max) {
  const auto m = moments(state);
  QuadratureRule rule;
  rule.r_max = std::max(default_r_max(n_max), m.r + 20.0 * m.delta_r());
  return rule;
}

EigenExpansion expand_in_eigenbasis(const RadialSqueezedState& state, int n_lo, int n_hi, int l,
                                    QuadratureRule rule) {
  if (n_lo < l + 1 || n_hi < n_lo) throw std::invalid_argument("invalid level range");
  if (rule.r_max <= 0.0) rule.r_max = expansion_rule(state, n_hi).r_max;
  EigenExpansion out;
  out.l = l;
  const RadialFunction f = [&](double r) { return state(r); };
  for (int n = n_lo; n <= n_hi; ++n) {
    out.n.push_back(n);
    out.c.push_back(overlap(f, n, l, rule));
  }
  return out;
}

EvolvedState::EvolvedState(EigenExpansion expansion, EnergyModel model, const QuadratureRule& rule)
    : expansion_(std::move(expansion)), model_(model), rule_(rule) {
  const std::size_t levels = expansion_.n.size();
  if (levels == 0 || levels != expansion_.c.size())
    throw std::invalid_argument("expansion must hold one coefficient per level");
  const int n_max = *std::max_element(expansion_.n.begin(), expansion_.n.end());
  r_max_ = std::max(rule.r_max, default_r_max(n_max));

  for (int n : expansion_.n) {
    states_.emplace_back(n, expansion_.l);
    energies_.push_back(energy(model_, n));
  }

  // Upper triangles of S, r, r^2, p_r^2 (with diagonal) and of D (without),
  // where <n|p_r|m> = -i D_nm and D is antisymmetric.
  const std::size_t tri = levels * (levels + 1) / 2;
  const std::size_t strict = levels * (levels - 1) / 2;
  const std::size_t dims = 4 * tri + strict;
  const double r_scale = static_cast<double>(n_max) * n_max;
  const double p_scale = 1.0 / n_max;
  std::vector<double> abs_tols(dims);
  for (std::size_t i = 0; i < tri; ++i) {
    abs_tols[i] = rule.abs_tol;
    abs_tols[tri + i] = rule.abs_tol * r_scale;
    abs_tols[2 * tri + i] = rule.abs_tol * r_scale * r_scale;
    abs_tols[3 * tri + i] = rule.abs_tol * p_scale * p_scale;
  }
  for (std::size_t i = 0; i < strict; ++i) abs_tols[4 * tri + i] = rule.abs_tol * p_scale;

  std::vector<double> value(levels), grad(levels);
  const BatchIntegrand integrand = [&](double r, std::span<double> out) {
    for (std::size_t i = 0; i < levels; ++i) {
      const auto v = states_[i].evaluate(r);
      value[i] = v.value;
      grad[i] = v.derivative + v.value / r; // (d/dr + 1/r) R
    }
    const double w = r * r;
    std::size_t k = 0, s = 0;
    for (std::size_t i = 0; i < levels; ++i) {
      for (std::size_t j = i; j < levels; ++j, ++k) {
        const double rr = value[i] * value[j] * w;
        out[k] = rr;
        out[tri + k] = rr * r;
        out[2 * tri + k] = rr * r * r;
        out[3 * tri + k] = grad[i] * grad[j] * w;
        if (j > i) out[4 * tri + s++] = value[i] * grad[j] * w;
      }
    }
  };
  const auto bp = radial_breakpoints(n_max, r_max_);
  const auto res = integrate_batch(integrand, dims, bp, rule, abs_tols);

  auto full = [&](std::size_t offset) {
    std::vector<double> m(levels * levels);
    std::size_t k = 0;
    for (std::size_t i = 0; i < levels; ++i)
      for (std::size_t j = i; j < levels; ++j, ++k)
        m[i * levels + j] = m[j * levels + i] = res[offset + k].value;
    return m;
  };
  overlap_ = full(0);
  r1_ = full(tri);
  r2_ = full(2 * tri);
  p2_ = full(3 * tri);
  dmat_.assign(levels * levels, 0.0);
  std::size_t s = 0;
  for (std::size_t i = 0; i < levels; ++i)
    for (std::size_t j = i + 1; j < levels; ++j, ++s) {
      dmat_[i * levels + j] = res[4 * tri + s].value;
      dmat_[j * levels + i] = -res[4 * tri + s].value;
    }
}

std::vector<std::complex<double>> EvolvedState::amplitudes(TimeAu t) const {
  std::vector<std::complex<double>> a(expansion_.c.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = expansion_.c[i] * phase_factor(energies_[i], t);
  return a;
}

std::complex<double> EvolvedState::value(double r, TimeAu t) const {
  const auto a = amplitudes(t);
  std::vector<std::complex<double>> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) terms[i] = a[i] * states_[i](r);
  return pairwise_sum<std::complex<double>>(terms);
}

UncertaintySample EvolvedState::sample(TimeAu t) const {
  const auto a = amplitudes(t);
  const std::size_t levels = a.size();
  auto quadratic = [&](const std::vector<double>& m) {
    std::vector<double> terms;
    terms.reserve(levels * (levels + 1) / 2);
    for (std::size_t i = 0; i < levels; ++i) {
      terms.push_back(std::norm(a[i]) * m[i * levels + i]);
      for (std::size_t j = i + 1; j < levels; ++j)
        terms.push_back(2.0 * (std::conj(a[i]) * a[j]).real() * m[i * levels + j]);
    }
    return pairwise_sum<double>(terms);
  };
  std::vector<double> pterms;
  for (std::size_t i = 0; i < levels; ++i)
    for (std::size_t j = i + 1; j < levels; ++j)
      pterms.push_back(2.0 * (std::conj(a[i]) * a[j]).imag() * dmat_[i * levels + j]);

  UncertaintySample out;
  out.t_ns = au_to_ns(t).value;
  out.norm = quadratic(overlap_);
  out.r_mean = quadratic(r1_) / out.norm;
  const double r2 = quadratic(r2_) / out.norm;
  out.p_mean = pairwise_sum<double>(pterms) / out.norm;
  const double p2 = quadratic(p2_) / out.norm;
  out.delta_r = std::sqrt(std::max(0.0, r2 - out.r_mean * out.r_mean));
  out.delta_p = std::sqrt(std::max(0.0, p2 - out.p_mean * out.p_mean));
  return out;
}

UncertaintySample EvolvedState::sample_by_quadrature(TimeAu t) const {
  const auto a = amplitudes(t);
  const BatchIntegrand integrand = [&](double r, std::span<double> out) {
    std::complex<double> psi, dpsi;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto v = states_[i].evaluate(r);
      psi += a[i] * v.value;
      dpsi += a[i] * (v.derivative + v.value / r);
    }
    const double dens = std::norm(psi) * r * r;
    out[0] = dens;
    out[1] = dens * r;
    out[2] = dens * r * r;
    // Re(conj(psi) * (-i) * (d/dr + 1/r) psi)
    out[3] = (std::conj(psi) * std::complex<double>(0.0, -1.0) * dpsi).real() * r * r;
    out[4] = std::norm(dpsi) * r * r;
  };
  const int n_max = *std::max_element(expansion_.n.begin(), expansion_.n.end());
  const double r_scale = static_cast<double>(n_max) * n_max;
  const double tols[] = {rule_.abs_tol, rule_.abs_tol * r_scale, rule_.abs_tol * r_scale * r_scale,
                         rule_.abs_tol / n_max, rule_.abs_tol / (static_cast<double>(n_max) * n_max)};
  const auto res = integrate_batch(integrand, 5, radial_breakpoints(n_max, r_max_), rule_, tols);

  UncertaintySample out;
  out.t_ns = au_to_ns(t).value;
  out.norm = res[0].value;
  out.r_mean = res[1].value / out.norm;
  out.p_mean = res[3].value / out.norm;
  out.delta_r = std::sqrt(std::max(0.0, res[2].value / out.norm - out.r_mean * out.r_mean));
  out.delta_p = std::sqrt(std::max(0.0, res[4].value / out.norm - out.p_mean * out.p_mean));
  return out;
}

double EvolvedState::norm_by_quadrature(TimeAu t) const { return sample_by_quadrature(t).norm; }

EvolvedState evolve(const EigenExpansion& expansion, const EnergyModel& model,
                    const QuadratureRule& rule) {
  return EvolvedState(expansion, model, rule);
}

std::vector<UncertaintySample> uncertainty_trace(const EvolvedState& state, const TimeGrid& grid) {
  std::vector<UncertaintySample> out;
  const std::size_t count = grid.size();
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto s = state.sample(ns_to_au(TimeNs{grid.at(i)}));
    s.t_ns = grid.at(i);
    out.push_back(s);
  }
  return out;
}

std::string uncertainty_to_csv(const std::vector<UncertaintySample>& samples) {
  std::string out = "t_ns,r_mean,delta_r,delta_p,product\n";
  for (const auto& s : samples) {
    const double row[] = {s.t_ns, s.r_mean, s.delta_r, s.delta_p, s.product()};
    out += csv::format_row(row);
  }
  return out;
}

} // namespace rydberg
