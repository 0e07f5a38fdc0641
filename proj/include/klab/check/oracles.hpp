#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

// Reference values computed by methods that share no code with the library:
// direct quadrature, brute-force counting, extended precision and closed forms.
namespace klab::oracle {

/// J0(x) = (1/pi) int_0^pi cos(x sin th) dth by composite Simpson.
double j0_simpson(double x, int intervals = 10000);

/// First positive zero of j0_simpson, by bisection on [2, 3].
double j0_simpson_first_zero();

/// #{m in Z^n : |m| <= radius} for n = 1, 2, 3 by direct enumeration.
long long lattice_ball_count(int n, double radius);

/// P_l(x) by the three-term recurrence in 50-digit arithmetic.
double legendre_extended(int l, double x);

/// P_l(0)^2 from the central binomial closed form.
double legendre_at_zero_squared(int l);

/// Aggregated jump of N at degree l for the equator of the unit sphere:
/// (2 pi)^2 (2l+1)/(4 pi) P_l(0)^2.
double sphere_equator_jump(int l);

/// int rho(x) cos(t x) dx for rho(x) = (3a / 8pi) sinc^4(a x / 4), by
/// Gauss-Legendre panels of width 1 out to |x| = cutoff plus the averaged tail.
double kernel_fourier_quadrature(double a, double t, double cutoff = 2.0e4);

/// int_{-cutoff}^{cutoff} rho by the same panels, plus the tail.
double kernel_mass_quadrature(double a, double cutoff = 2.0e4);

/// Times 0 < |t| <= t_max at which the line x0 + t u (|u| = 1) meets a lattice
/// translate of the circle |x - c| = r perpendicularly, within tol. The lattice
/// has rows of `basis` as generators.
std::vector<double> circle_conormal_returns(const Eigen::Matrix2d& basis, const Eigen::Vector2d& c, double r,
                                            const Eigen::Vector2d& x0, const Eigen::Vector2d& u, double t_max,
                                            double tol);

/// Focal count on (0, t) (minus the count on (t, 0) for t < 0) of the family
/// of normal lines to a flat circle of radius r. zeta = +1 outward, -1 inward.
/// The normal Jacobi field is (r + zeta tau) times the unit tangent.
int flat_circle_focal_count(double r, double zeta, double t);

/// Same for a great circle of the sphere of radius R: Jacobi field R cos(tau / R)
/// vanishing at tau = (j + 1/2) pi R.
int sphere_great_circle_focal_count(double R, double t);

/// Same for a latitude circle at co-latitude theta0 on the unit sphere, from
/// J(tau) = sin(theta0) cos(tau) + zeta cos(theta0) sin(tau) (zeta = +1 toward
/// increasing theta).
int sphere_latitude_focal_count(double theta0, double zeta, double t);

/// The sum over k of |e_k(x0)|^2 = #{|m| <= lambda} / vol for the standard
/// torus R^2 / (2 pi Z)^2 and a point H.
double point_counting_value(double lambda);

}  // namespace klab::oracle
