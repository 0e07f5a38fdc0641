#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "klab/geometry.hpp"
#include "klab/numeric.hpp"
#include "klab/spectrum.hpp"

namespace klab {

/// N(lambda) = sum_{lambda_j <= lambda} |P_j|^2 as a sorted jump list.
class CountingFunction {
 public:
  CountingFunction() = default;
  /// (lambda_j, |P_j|^2) pairs in ascending lambda order. Locations closer than
  /// 1e-12 (relative) are merged; cumulative values come from one running
  /// compensated sum over the items in the given order.
  explicit CountingFunction(const std::vector<std::pair<double, double>>& items);

  /// Right-continuous evaluation.
  double operator()(double lambda) const;

  const std::vector<double>& locations() const { return locations_; }
  const std::vector<double>& jumps() const { return jumps_; }
  const std::vector<double>& cumulative() const { return cumulative_; }
  double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  bool empty() const { return locations_.empty(); }

 private:
  std::vector<double> locations_;
  std::vector<double> jumps_;
  std::vector<double> cumulative_;
};

CountingFunction staircase(const SpectrumTable& table);

/// C_{H,M} = (2 pi)^{-(n-d)} vol(H) vol(B^{n-d}).
double main_constant(const ModelManifold& model, const Submanifold& h);

/// rho(x) = c_a sinc^4(a x / 4), whose Fourier transform is the cubic B-spline
/// 1.5 M4(2 t / a) supported in [-a, a] with rho_hat(0) = 1.
class SmoothingKernel {
 public:
  explicit SmoothingKernel(double a);

  double a() const { return a_; }
  double peak() const { return c_; }
  /// |x| beyond which rho < 1e-14.
  double tail_radius() const { return tail_; }

  double rho(double x) const;
  double rho_hat(double t) const;
  /// R(x) = int_{-inf}^x rho.
  double primitive(double x) const;

 private:
  double half_integral(double x) const;  // int_0^x rho for 0 <= x <= tail

  double a_;
  double b_;  // a / 4
  double c_;
  double tail_;
  double panel_;
  std::vector<double> panel_sums_;  // int_0^{k panel} rho
  std::vector<double> gl_nodes_;
  std::vector<double> gl_weights_;
};

/// Throws ConfigError for a <= 0.
SmoothingKernel make_kernel(double a);

enum class ConvolutionMode { N, dN };

/// dN: sum_j |P_j|^2 rho(lambda - lambda_j). N: sum_j |P_j|^2 R(lambda - lambda_j).
double convolve_counting(const CountingFunction& ncf, const SmoothingKernel& kernel, double lambda,
                         ConvolutionMode mode);

std::vector<double> convolve_grid(const CountingFunction& ncf, const SmoothingKernel& kernel,
                                  const std::vector<double>& grid, ConvolutionMode mode,
                                  const Executor& exec = Executor{});

/// Midpoints between consecutive jump locations, restricted to [lo, hi].
std::vector<double> midpoint_grid(const CountingFunction& ncf, double lo, double hi);
std::vector<double> uniform_grid(double lo, double hi, double step);

struct WindowStats {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double mean_abs = 0.0;
  double max_abs = 0.0;
};

struct TwoTermReport {
  std::vector<double> grid;
  std::vector<double> n_values;
  std::vector<double> main_term;
  std::vector<double> correction;
  std::vector<double> residual;
  double c0 = 0.0;
  bool c0_fitted = false;
  std::vector<WindowStats> windows;  // width-10 windows over the grid range
  std::vector<std::string> warnings;
};

/// r = N - C lambda^e - Q(lambda) lambda^{e-1} - C0 with e = n - d. With fit_c,
/// C0 is the median of N - C lambda^e - Q lambda^{e-1} over the last width-10
/// window of the grid.
TwoTermReport two_term_report(const CountingFunction& ncf, double C, int exponent,
                              const std::function<double(double)>& q_eval, const std::vector<double>& grid,
                              bool fit_c, const Executor& exec = Executor{});

/// Residual statistics on lo <= lambda <= hi.
WindowStats window_stats(const TwoTermReport& report, double lo, double hi);

/// N(lambda + eps) - N(lambda).
double quasimode_jump(const CountingFunction& ncf, double lambda, double eps);

}  // namespace klab
