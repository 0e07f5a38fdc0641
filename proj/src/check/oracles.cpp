#include "klab/check/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace klab::oracle {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

double kernel_rho(double a, double x) {
  const double b = a / 4.0;
  const double y = b * x;
  const double s = y == 0.0 ? 1.0 : std::sin(y) / y;
  return 3.0 * a / (8.0 * kPi) * s * s * s * s;
}

template <class F>
double panel_integral(F f, double cutoff) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  Kahan acc;
  const auto panels = static_cast<long>(std::ceil(cutoff));
  for (long k = 0; k < panels; ++k) {
    const double lo = static_cast<double>(k);
    const double hi = std::min(cutoff, lo + 1.0);
    acc.add(Rule::integrate(f, lo, hi));
  }
  return acc.sum;
}

int count_in_open(double lo, double hi, double first, double period) {
  // number of first + j * period (j in Z) strictly inside (lo, hi)
  if (!(hi > lo)) return 0;
  const double jlo = std::floor((lo - first) / period) + 1.0;
  const double jhi = std::ceil((hi - first) / period) - 1.0;
  return jhi >= jlo ? static_cast<int>(jhi - jlo + 1.0) : 0;
}

int signed_count(double t, double first, double period) {
  return t >= 0.0 ? count_in_open(0.0, t, first, period) : -count_in_open(t, 0.0, first, period);
}

}  // namespace

double j0_simpson(double x, int intervals) {
  if (intervals < 2 || intervals % 2) throw std::invalid_argument("Simpson needs an even interval count");
  const double h = kPi / intervals;
  Kahan acc;
  for (int i = 0; i <= intervals; ++i) {
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc.add(w * std::cos(x * std::sin(i * h)));
  }
  return acc.sum * h / 3.0 / kPi;
}

double j0_simpson_first_zero() {
  double lo = 2.0, hi = 3.0;
  double flo = j0_simpson(lo);
  for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = j0_simpson(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

long long lattice_ball_count(int n, double radius) {
  if (radius < 0.0) return 0;
  const auto R = static_cast<long long>(std::floor(radius));
  const double r2 = radius * radius;
  long long count = 0;
  if (n == 1) return 2 * R + 1;
  if (n == 2) {
    for (long long i = -R; i <= R; ++i)
      for (long long j = -R; j <= R; ++j)
        if (static_cast<double>(i * i + j * j) <= r2) ++count;
    return count;
  }
  if (n == 3) {
    for (long long i = -R; i <= R; ++i)
      for (long long j = -R; j <= R; ++j)
        for (long long k = -R; k <= R; ++k)
          if (static_cast<double>(i * i + j * j + k * k) <= r2) ++count;
    return count;
  }
  throw std::invalid_argument("lattice_ball_count: n must be 1, 2 or 3");
}

double legendre_extended(int l, double x) {
  using boost::multiprecision::cpp_bin_float_50;
  cpp_bin_float_50 X = x;
  cpp_bin_float_50 p0 = 1, p1 = X;
  if (l == 0) return 1.0;
  for (int k = 1; k < l; ++k) {
    cpp_bin_float_50 p2 = ((2 * k + 1) * X * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  return static_cast<double>(p1);
}

double legendre_at_zero_squared(int l) {
  if (l % 2) return 0.0;
  double p = 1.0;
  for (int j = 1; j <= l / 2; ++j) p *= (2.0 * j - 1.0) / (2.0 * j);
  return p * p;
}

double sphere_equator_jump(int l) { return kPi * (2.0 * l + 1.0) * legendre_at_zero_squared(l); }

double kernel_fourier_quadrature(double a, double t, double cutoff) {
  return 2.0 * panel_integral([&](double x) { return kernel_rho(a, x) * std::cos(t * x); }, cutoff);
}

double kernel_mass_quadrature(double a, double cutoff) {
  const double b = a / 4.0;
  const double c = 3.0 * a / (8.0 * kPi);
  // sin^4 averages to 3/8 on the tail
  const double tail = c * 0.375 / (3.0 * std::pow(b, 4) * cutoff * cutoff * cutoff);
  return 2.0 * (panel_integral([&](double x) { return kernel_rho(a, x); }, cutoff) + tail);
}

std::vector<double> circle_conormal_returns(const Eigen::Matrix2d& basis, const Eigen::Vector2d& c, double r,
                                            const Eigen::Vector2d& x0, const Eigen::Vector2d& u, double t_max,
                                            double tol) {
  std::vector<double> times;
  const double shortest = std::min(basis.row(0).norm(), basis.row(1).norm());
  const double reach = t_max + (x0 - c).norm() + r;
  const auto K = static_cast<int>(std::ceil(reach / shortest * 2.0)) + 2;
  for (int i = -K; i <= K; ++i) {
    for (int j = -K; j <= K; ++j) {
      const Eigen::Vector2d ck = c + i * basis.row(0).transpose() + j * basis.row(1).transpose();
      const double tau = (ck - x0).dot(u);
      const double miss = (ck - x0 - tau * u).norm();
      if (miss > tol) continue;
      for (double t : {tau - r, tau + r}) {
        if (std::abs(t) > 1e-9 && std::abs(t) <= t_max) times.push_back(t);
      }
    }
  }
  std::sort(times.begin(), times.end());
  return times;
}

int flat_circle_focal_count(double r, double zeta, double t) {
  // r + zeta tau = 0
  const double tau = -r / zeta;
  if (t > 0.0) return (tau > 0.0 && tau < t) ? 1 : 0;
  return (tau < 0.0 && tau > t) ? -1 : 0;
}

int sphere_great_circle_focal_count(double R, double t) {
  return signed_count(t, 0.5 * kPi * R, kPi * R);
}

int sphere_latitude_focal_count(double theta0, double zeta, double t) {
  // sin(theta0 + zeta tau) = 0
  return signed_count(t, -zeta * theta0, kPi);
}

double point_counting_value(double lambda) {
  return static_cast<double>(lattice_ball_count(2, lambda)) / (4.0 * kPi * kPi);
}

}  // namespace klab::oracle
