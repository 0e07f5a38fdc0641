#include <cmath>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <gtest/gtest.h>

#include "klab/check/oracles.hpp"
#include "klab/special_functions.hpp"

using namespace klab;

namespace {
constexpr double kPi = 3.141592653589793;
}

TEST(BesselJ0, FrozenQuadratureValues) {
  // Composite Simpson of (1/pi) int_0^pi cos(x sin th) dth, 1e4 intervals.
  EXPECT_NEAR(bessel_j0(1.0), 0.76519768655796649, 1e-14);
  EXPECT_NEAR(bessel_j0(10.0), -0.24593576445134843, 1e-14);
  EXPECT_NEAR(bessel_j0(29.5), -0.13314785829839829, 1e-13);
  EXPECT_NEAR(bessel_j0(30.5), -0.0193897545177622, 1e-13);
  EXPECT_NEAR(bessel_j0(100.0), 0.019985850304223094, 1e-13);
  EXPECT_NEAR(bessel_j0(199.0), -0.054139528598386645, 1e-13);
}

TEST(BesselJ0, MatchesQuadratureOnDenseGrid) {
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = 0.5 * i + 0.013;
    worst = std::max(worst, std::abs(bessel_j0(x) - oracle::j0_simpson(x)));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(BesselJ0, ContinuousAcrossBranchSwitch) {
  for (double dx : {1e-9, 1e-6, 1e-3}) {
    const double lo = bessel_j0(kBesselSwitchPoint - dx);
    const double hi = bessel_j0(kBesselSwitchPoint + dx);
    EXPECT_NEAR(lo, oracle::j0_simpson(kBesselSwitchPoint - dx), 1e-13);
    EXPECT_NEAR(hi, oracle::j0_simpson(kBesselSwitchPoint + dx), 1e-13);
  }
}

TEST(BesselJ0, FirstZero) {
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve([](double x) { return bessel_j0(x); }, 2.0, 3.0,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
  EXPECT_NEAR(0.5 * (r.first + r.second), 2.404825557695773, 1e-12);
}

TEST(BesselJ0, EvenAndBounded) {
  EXPECT_EQ(bessel_j0(0.0), 1.0);
  for (double x = 0.0; x < 200.0; x += 0.37) EXPECT_LE(std::abs(bessel_j0(x)), 1.0);
}

TEST(BesselJ0, RejectsInvalidInput) {
  EXPECT_THROW(bessel_j0(-1.0), std::domain_error);
  EXPECT_THROW(bessel_j0(NAN), std::domain_error);
  EXPECT_THROW(bessel_j0(INFINITY), std::domain_error);
}

TEST(Legendre, FrozenExtendedPrecisionValues) {
  // 50-digit recurrence.
  EXPECT_NEAR(legendre_p(10, 0.3), 0.25147634951601561, 1e-14);
  EXPECT_NEAR(legendre_p(10, -0.91), -0.32768574464300326, 1e-14);
  EXPECT_NEAR(legendre_p(100, 0.3), 0.057127392202801351, 1e-13);
  EXPECT_NEAR(legendre_p(100, -0.91), -0.028737034253855941, 1e-13);
  EXPECT_NEAR(legendre_p(257, 0.3), 0.0041345737876369113, 1e-13);
  EXPECT_NEAR(legendre_p(257, -0.91), 0.061107336808604522, 1e-13);
}

TEST(Legendre, MatchesExtendedPrecision) {
  for (int l : {0, 1, 2, 5, 31, 64, 200, 1000}) {
    for (double x : {-1.0, -0.77, -0.2, 0.0, 0.41, 0.999, 1.0}) {
      EXPECT_NEAR(legendre_p(l, x), oracle::legendre_extended(l, x), 1e-12) << "l=" << l << " x=" << x;
    }
  }
}

TEST(Legendre, ValueAtZeroMatchesCentralBinomial) {
  for (int l = 0; l <= 120; ++l) {
    const double p = legendre_p(l, 0.0);
    EXPECT_NEAR(p * p, oracle::legendre_at_zero_squared(l), 1e-15);
  }
}

TEST(Legendre, Endpoints) {
  for (int l = 0; l < 50; ++l) {
    EXPECT_DOUBLE_EQ(legendre_p(l, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(legendre_p(l, -1.0), l % 2 ? -1.0 : 1.0);
  }
}

TEST(Legendre, RejectsInvalidInput) {
  EXPECT_THROW(legendre_p(3, 1.5), std::domain_error);
  EXPECT_THROW(legendre_p(-1, 0.5), std::domain_error);
}

TEST(ZonalHarmonic, UnitNormOnSphere) {
  const GaussLegendreRule gl = gauss_legendre(80);
  for (int l : {0, 3, 20, 50}) {
    double norm = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double y = zonal_harmonic(l, std::acos(gl.nodes[i]));
      norm += gl.weights[i] * y * y;
    }
    EXPECT_NEAR(2.0 * kPi * norm, 1.0, 1e-12) << "l=" << l;
  }
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int m : {1, 4, 12, 24}) {
    const GaussLegendreRule gl = gauss_legendre(m);
    ASSERT_EQ(gl.nodes.size(), static_cast<std::size_t>(m));
    for (int k = 0; k < 2 * m; ++k) {
      double sum = 0.0;
      for (int i = 0; i < m; ++i) sum += gl.weights[i] * std::pow(gl.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(sum, exact, 1e-14) << "m=" << m << " k=" << k;
    }
  }
}
