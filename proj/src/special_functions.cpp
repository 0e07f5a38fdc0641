#include "klab/special_functions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "klab/numeric.hpp"

namespace klab {
namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

double j0_series(double x) {
  // sum_k (-x^2/4)^k / (k!)^2
  const Quad q = Quad(x) * Quad(x) / 4;
  Quad term = 1;
  Quad sum = 1;
  for (int k = 1; k < 400; ++k) {
    term *= -q;
    term /= Quad(k) * Quad(k);
    sum += term;
    if (k > q && abs(term) < Quad(1e-36)) break;
  }
  return static_cast<double>(sum);
}

double j0_asymptotic(double x) {
  // J0(x) = sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4)),
  // a_k = prod_{j<=k} (2j-1)^2 / (k! 8^k) with alternating signs in P and Q.
  const double inv8x = 1.0 / (8.0 * x);
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;  // |a_k| / x^k
  double prev = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= odd * odd * inv8x / k;
    if (k > 6 && (a > prev || a < 1e-17)) break;
    prev = a;
    // P = 1 - a2 + a4 - ..., Q = -a1 + a3 - ...
    switch (k % 4) {
      case 1: q -= a; break;
      case 2: p -= a; break;
      case 3: q += a; break;
      default: p += a; break;
    }
  }
  // cos(x - pi/4) = (cos x + sin x)/sqrt2, sin(x - pi/4) = (sin x - cos x)/sqrt2
  const double c = std::cos(x);
  const double s = std::sin(x);
  const double amplitude = std::sqrt(2.0 / (kPi * x)) / std::sqrt(2.0);
  return amplitude * (p * (c + s) - q * (s - c));
}

}  // namespace

double bessel_j0(double x) {
  if (!std::isfinite(x) || x < 0.0) throw std::domain_error("bessel_j0: argument must be finite and nonnegative");
  if (x > 1e6) throw std::domain_error("bessel_j0: argument above 1e6");
  if (x <= kBesselSwitchPoint) return j0_series(x);
  return j0_asymptotic(x);
}

double legendre_p(int l, double x) {
  if (!(std::abs(x) <= 1.0)) throw std::domain_error("legendre_p: |x| > 1");
  if (l < 0 || l > 10000) throw std::domain_error("legendre_p: degree outside [0, 1e4]");
  if (l == 0) return 1.0;
  double pm1 = 1.0;
  double p = x;
  for (int k = 1; k < l; ++k) {
    const double next = ((2.0 * k + 1.0) * x * p - k * pm1) / (k + 1.0);
    pm1 = p;
    p = next;
  }
  return p;
}

double zonal_harmonic(int l, double theta) {
  return std::sqrt((2.0 * l + 1.0) / (4.0 * kPi)) * legendre_p(l, std::cos(theta));
}

GaussLegendreRule gauss_legendre(int m) {
  if (m < 1) throw std::domain_error("gauss_legendre: need at least one node");
  GaussLegendreRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double p = legendre_p(m, x);
      const double pm1 = legendre_p(m - 1, x);
      dp = m * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double p = legendre_p(m, x);
    const double pm1 = legendre_p(m - 1, x);
    dp = m * (x * p - pm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  return rule;
}

}  // namespace klab
