#include "rydberg/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

#include "rydberg/error.hpp"
#include "rydberg/summation.hpp"

namespace rydberg {

namespace {

// Kronrod abscissae (descending, last is the centre) and weights; the
// Gauss 7-point weights belong to the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> value;
  std::vector<double> error;
};

Panel evaluate_panel(const BatchIntegrand& f, std::size_t dims, double a, double b,
                     std::vector<double>& scratch) {
  Panel p{a, b, std::vector<double>(dims, 0.0), std::vector<double>(dims, 0.0)};
  std::vector<double> gauss(dims, 0.0);
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  auto accumulate = [&](double x, std::size_t node) {
    f(x, scratch);
    for (std::size_t d = 0; d < dims; ++d) {
      p.value[d] += kWgk[node] * scratch[d];
      if (node % 2 == 1) gauss[d] += kWg[node / 2] * scratch[d];
    }
  };
  accumulate(center, 7);
  for (std::size_t node = 0; node < 7; ++node) {
    accumulate(center - half * kXgk[node], node);
    accumulate(center + half * kXgk[node], node);
  }
  for (std::size_t d = 0; d < dims; ++d) {
    p.value[d] *= half;
    p.error[d] = std::abs(p.value[d] - half * gauss[d]);
  }
  return p;
}

} // namespace

std::vector<double> uniform_breakpoints(double a, double b, std::size_t n) {
  if (n == 0) n = 1;
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  out.back() = b;
  return out;
}

std::vector<QuadratureResult> integrate_batch(const BatchIntegrand& f, std::size_t dims,
                                              std::span<const double> breakpoints,
                                              const QuadratureRule& rule) {
  const std::vector<double> abs_tols(dims, rule.abs_tol);
  return integrate_batch(f, dims, breakpoints, rule, abs_tols);
}

std::vector<QuadratureResult> integrate_batch(const BatchIntegrand& f, std::size_t dims,
                                              std::span<const double> breakpoints,
                                              const QuadratureRule& rule,
                                              std::span<const double> abs_tols) {
  if (abs_tols.size() != dims) throw std::invalid_argument("need one absolute tolerance per component");
  for (double t : abs_tols)
    if (!(t > 0.0)) throw std::invalid_argument("quadrature tolerances must be positive");
  if (breakpoints.size() < 2) throw std::invalid_argument("need at least two breakpoints");
  if (!(rule.rel_tol > 0.0))
    throw std::invalid_argument("quadrature tolerances must be positive");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw std::invalid_argument("quadrature breakpoints must be increasing");

  std::vector<double> scratch(dims);
  std::vector<Panel> panels;
  std::vector<double> total(dims, 0.0);
  std::vector<double> total_err(dims, 0.0);

  auto tolerance = [&](std::size_t d) { return std::max(abs_tols[d], rule.rel_tol * std::abs(total[d])); };
  auto priority = [&](const Panel& p) {
    double key = 0.0;
    for (std::size_t d = 0; d < dims; ++d) key = std::max(key, p.error[d] / tolerance(d));
    return key;
  };

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> queue;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    panels.push_back(evaluate_panel(f, dims, breakpoints[i - 1], breakpoints[i], scratch));
    for (std::size_t d = 0; d < dims; ++d) {
      total[d] += panels.back().value[d];
      total_err[d] += panels.back().error[d];
    }
  }
  for (std::size_t i = 0; i < panels.size(); ++i) queue.emplace(priority(panels[i]), i);

  auto converged = [&] {
    for (std::size_t d = 0; d < dims; ++d)
      if (total_err[d] > tolerance(d)) return false;
    return true;
  };

  while (!converged()) {
    if (panels.size() >= rule.max_panels)
      throw NumericalError("adaptive quadrature did not converge within " +
                           std::to_string(rule.max_panels) + " panels");
    const std::size_t worst = queue.top().second;
    queue.pop();
    const double a = panels[worst].a;
    const double b = panels[worst].b;
    const double mid = 0.5 * (a + b);
    if (!(mid > a && mid < b))
      throw NumericalError("adaptive quadrature panel underflow near x = " + std::to_string(a));

    Panel left = evaluate_panel(f, dims, a, mid, scratch);
    Panel right = evaluate_panel(f, dims, mid, b, scratch);
    for (std::size_t d = 0; d < dims; ++d) {
      total[d] += left.value[d] + right.value[d] - panels[worst].value[d];
      total_err[d] = std::max(0.0, total_err[d] + left.error[d] + right.error[d] - panels[worst].error[d]);
    }
    panels[worst] = std::move(left);
    panels.push_back(std::move(right));
    queue.emplace(priority(panels[worst]), worst);
    queue.emplace(priority(panels.back()), panels.size() - 1);
  }

  // Deterministic final reduction in position order.
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  std::vector<QuadratureResult> out(dims);
  std::vector<double> column(panels.size());
  for (std::size_t d = 0; d < dims; ++d) {
    for (std::size_t i = 0; i < panels.size(); ++i) column[i] = panels[i].value[d];
    out[d].value = pairwise_sum<double>(column);
    for (std::size_t i = 0; i < panels.size(); ++i) column[i] = panels[i].error[d];
    out[d].error = pairwise_sum<double>(column);
    out[d].panels = panels.size();
  }
  return out;
}

QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> breakpoints, const QuadratureRule& rule) {
  const BatchIntegrand batch = [&](double x, std::span<double> out) { out[0] = f(x); };
  return integrate_batch(batch, 1, breakpoints, rule).front();
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureRule& rule, std::size_t initial_panels) {
  const auto bp = uniform_breakpoints(a, b, initial_panels);
  return integrate(f, bp, rule);
}

} // namespace rydberg
