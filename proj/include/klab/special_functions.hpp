#pragma once

#include <vector>

namespace klab {

/// Bessel function J0 for 0 <= x <= 1e6.
///
/// x <= 30: power series summed in quad precision (the alternating terms grow to
/// ~1e11 at x = 30, so double precision cannot reach 1e-12 absolute).
/// x > 30: Hankel asymptotic expansion, summed until the terms stop decreasing
/// or drop below 1e-17 (at least 6 terms).
/// Throws std::domain_error for negative, non-finite or out-of-range input.
double bessel_j0(double x);

/// Point where bessel_j0 switches from the series to the asymptotic branch.
inline constexpr double kBesselSwitchPoint = 30.0;

/// Legendre polynomial P_l(x) by the three-term recurrence.
/// Throws std::domain_error for |x| > 1 or l outside [0, 1e4].
double legendre_p(int l, double x);

/// Normalized zonal spherical harmonic Y_l^0(theta) = sqrt((2l+1)/(4 pi)) P_l(cos theta).
double zonal_harmonic(int l, double theta);

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// m-point Gauss-Legendre rule on [-1, 1].
GaussLegendreRule gauss_legendre(int m);

}  // namespace klab
