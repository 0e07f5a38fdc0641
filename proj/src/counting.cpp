#include "klab/counting.hpp"

#include <algorithm>
#include <cmath>

#include "klab/errors.hpp"
#include "klab/special_functions.hpp"

namespace klab {
namespace {

constexpr double kTailLevel = 1e-14;
constexpr int kPanelNodes = 24;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

CountingFunction::CountingFunction(const std::vector<std::pair<double, double>>& items) {
  CompensatedSum running;
  CompensatedSum group;
  for (const auto& [lambda, mass] : items) {
    if (mass < 0.0 || !std::isfinite(mass)) throw ConfigError("counting function: jump sizes must be finite and >= 0");
    if (!locations_.empty() && lambda < locations_.back())
      throw ConfigError("counting function: jump locations must be ascending");
    running.add(mass);
    if (!locations_.empty() && lambda - locations_.back() <= 1e-12 * std::max(1.0, std::abs(lambda))) {
      group.add(mass);
      jumps_.back() = group.value();
      cumulative_.back() = running.value();
      continue;
    }
    group = CompensatedSum();
    group.add(mass);
    locations_.push_back(lambda);
    jumps_.push_back(group.value());
    cumulative_.push_back(running.value());
  }
}

double CountingFunction::operator()(double lambda) const {
  const auto it = std::upper_bound(locations_.begin(), locations_.end(), lambda);
  if (it == locations_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - locations_.begin()) - 1];
}

CountingFunction staircase(const SpectrumTable& table) {
  std::vector<std::pair<double, double>> items;
  items.reserve(table.items.size());
  for (const auto& item : table.items) items.emplace_back(item.lambda, std::norm(item.period));
  return CountingFunction(items);
}

double main_constant(const ModelManifold& model, const Submanifold& h) {
  (void)model;
  const int c = h.codim();
  return std::pow(kTwoPi, -c) * h.volume() * unit_ball_volume(c);
}

// ---------------------------------------------------------------------------
// Kernel

SmoothingKernel::SmoothingKernel(double a) : a_(a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("kernel support radius a must be positive");
  b_ = a / 4.0;
  c_ = 3.0 * a / (8.0 * kPi);
  // rho(x) <= c / (b x)^4
  tail_ = std::pow(c_ / kTailLevel, 0.25) / b_;
  panel_ = 2.0 / a;
  const GaussLegendreRule gl = gauss_legendre(kPanelNodes);
  gl_nodes_ = gl.nodes;
  gl_weights_ = gl.weights;
  const auto panels = static_cast<std::size_t>(std::ceil(tail_ / panel_));
  panel_sums_.resize(panels + 1);
  CompensatedSum acc;
  panel_sums_[0] = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = panel_ * static_cast<double>(k);
    const double half = 0.5 * panel_;
    CompensatedSum piece;
    for (int i = 0; i < kPanelNodes; ++i) piece.add(gl_weights_[i] * rho(lo + half * (1.0 + gl_nodes_[i])));
    acc.add(half * piece.value());
    panel_sums_[k + 1] = acc.value();
  }
}

double SmoothingKernel::rho(double x) const {
  const double y = b_ * x;
  const double s = std::abs(y) < 1e-4 ? 1.0 - y * y / 6.0 + y * y * y * y / 120.0 : std::sin(y) / y;
  const double s2 = s * s;
  return c_ * s2 * s2;
}

double SmoothingKernel::rho_hat(double t) const {
  const double u = 2.0 * std::abs(t) / a_;
  if (u >= 2.0) return 0.0;
  if (u <= 1.0) return 1.5 * (2.0 / 3.0 - u * u + 0.5 * u * u * u);
  const double v = 2.0 - u;
  return 1.5 * v * v * v / 6.0;
}

double SmoothingKernel::half_integral(double x) const {
  const std::size_t last = panel_sums_.size() - 1;
  const std::size_t k = std::min(static_cast<std::size_t>(x / panel_), last);
  const double lo = panel_ * static_cast<double>(k);
  const double half = 0.5 * (x - lo);
  CompensatedSum piece;
  for (int i = 0; i < kPanelNodes; ++i) piece.add(gl_weights_[i] * rho(lo + half * (1.0 + gl_nodes_[i])));
  return panel_sums_[k] + half * piece.value();
}

double SmoothingKernel::primitive(double x) const {
  const double ax = std::abs(x);
  double upper;
  if (ax <= tail_) {
    upper = 0.5 + half_integral(ax);
  } else {
    // sin^4 averages to 3/8 beyond the cached range.
    upper = 1.0 - c_ / (8.0 * b_ * b_ * b_ * b_ * ax * ax * ax);
  }
  return x >= 0.0 ? upper : 1.0 - upper;
}

SmoothingKernel make_kernel(double a) { return SmoothingKernel(a); }

double convolve_counting(const CountingFunction& ncf, const SmoothingKernel& kernel, double lambda,
                         ConvolutionMode mode) {
  if (ncf.empty()) return 0.0;
  const auto& loc = ncf.locations();
  const auto& jumps = ncf.jumps();
  const double w = kernel.tail_radius();
  const auto first = static_cast<std::size_t>(std::lower_bound(loc.begin(), loc.end(), lambda - w) - loc.begin());
  const auto last = static_cast<std::size_t>(std::upper_bound(loc.begin(), loc.end(), lambda + w) - loc.begin());
  CompensatedSum sum;
  if (mode == ConvolutionMode::N) {
    // Everything left of the window has R = 1 up to the tail bound.
    if (first > 0) sum.add(ncf.cumulative()[first - 1]);
    for (std::size_t j = first; j < last; ++j) sum.add(jumps[j] * kernel.primitive(lambda - loc[j]));
  } else {
    for (std::size_t j = first; j < last; ++j) sum.add(jumps[j] * kernel.rho(lambda - loc[j]));
  }
  return sum.value();
}

std::vector<double> convolve_grid(const CountingFunction& ncf, const SmoothingKernel& kernel,
                                  const std::vector<double>& grid, ConvolutionMode mode, const Executor& exec) {
  std::vector<double> out(grid.size());
  exec.for_each_index(grid.size(), [&](std::size_t i) { out[i] = convolve_counting(ncf, kernel, grid[i], mode); });
  return out;
}

// ---------------------------------------------------------------------------
// Two-term report

std::vector<double> midpoint_grid(const CountingFunction& ncf, double lo, double hi) {
  std::vector<double> grid;
  const auto& loc = ncf.locations();
  for (std::size_t i = 0; i + 1 < loc.size(); ++i) {
    const double mid = 0.5 * (loc[i] + loc[i + 1]);
    if (mid >= lo && mid <= hi) grid.push_back(mid);
  }
  return grid;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  std::vector<double> grid;
  for (long long k = 0;; ++k) {
    const double x = lo + static_cast<double>(k) * step;
    if (x > hi * (1.0 + 1e-12) + 1e-12) break;
    grid.push_back(x);
  }
  return grid;
}

WindowStats window_stats(const TwoTermReport& report, double lo, double hi) {
  WindowStats w;
  w.lo = lo;
  w.hi = hi;
  CompensatedSum sum;
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    if (report.grid[i] < lo || report.grid[i] > hi) continue;
    const double r = std::abs(report.residual[i]);
    sum.add(r);
    w.max_abs = std::max(w.max_abs, r);
    ++w.count;
  }
  if (w.count) w.mean_abs = sum.value() / static_cast<double>(w.count);
  return w;
}

TwoTermReport two_term_report(const CountingFunction& ncf, double C, int exponent,
                              const std::function<double(double)>& q_eval, const std::vector<double>& grid,
                              bool fit_c, const Executor& exec) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("report grid must be strictly ascending");
  }
  TwoTermReport rep;
  rep.grid = grid;
  const std::size_t m = grid.size();
  rep.n_values.resize(m);
  rep.main_term.resize(m);
  rep.correction.resize(m);
  rep.residual.resize(m);
  exec.for_each_index(m, [&](std::size_t i) {
    const double x = grid[i];
    rep.n_values[i] = ncf(x);
    rep.main_term[i] = C * std::pow(x, exponent);
    rep.correction[i] = q_eval(x) * std::pow(x, exponent - 1);
  });
  for (std::size_t i = 0; i < m; ++i) rep.residual[i] = rep.n_values[i] - rep.main_term[i] - rep.correction[i];
  if (m == 0) return rep;

  const double first = grid.front(), last = grid.back();
  if (fit_c) {
    std::vector<double> tail;
    for (std::size_t i = 0; i < m; ++i) {
      if (grid[i] >= last - 10.0) tail.push_back(rep.residual[i]);
    }
    rep.c0 = median(tail);
    rep.c0_fitted = true;
    for (double& r : rep.residual) r -= rep.c0;
  }

  for (double lo = std::floor(first / 10.0) * 10.0; lo <= last; lo += 10.0) {
    const WindowStats w = window_stats(rep, lo, lo + 10.0);
    if (w.count) rep.windows.push_back(w);
  }

  if (m > 1) {
    const auto& loc = ncf.locations();
    const auto inside = std::count_if(loc.begin(), loc.end(), [&](double v) { return v >= first && v <= last; });
    const double step = (last - first) / static_cast<double>(m - 1);
    if (inside > 1) {
      const double gap = (last - first) / static_cast<double>(inside);
      if (step > 1.5 * gap)
        rep.warnings.push_back("staircase aliasing: grid step exceeds the mean eigenvalue gap");
    }
  }
  return rep;
}

double quasimode_jump(const CountingFunction& ncf, double lambda, double eps) {
  if (!(eps > 0.0)) throw ConfigError("quasimode window needs eps > 0");
  return ncf(lambda + eps) - ncf(lambda);
}

}  // namespace klab
