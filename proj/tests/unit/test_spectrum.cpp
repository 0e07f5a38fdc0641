#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "klab/check/oracles.hpp"
#include "klab/errors.hpp"
#include "klab/special_functions.hpp"
#include "klab/spectrum.hpp"

using namespace klab;

namespace {

ModelManifold torus(std::vector<double> lattice = {}) {
  ModelDescriptor d;
  d.lattice = std::move(lattice);
  return make_model(d);
}

Submanifold circle(const ModelManifold& m, double r = 1.0, std::vector<double> c = {kPi, kPi}) {
  SubmanifoldDescriptor d;
  d.center = std::move(c);
  d.r = r;
  return make_submanifold(m, d);
}

ModelManifold sphere(double R = 1.0) {
  ModelDescriptor d;
  d.kind = ModelKind::round_sphere;
  d.radius = R;
  return make_model(d);
}

Submanifold latitude(const ModelManifold& m, double theta0) {
  SubmanifoldDescriptor d;
  d.kind = SubmanifoldKind::latitude_circle;
  d.theta0 = theta0;
  return make_submanifold(m, d);
}

// Trapezoid rule on the circle (spectrally accurate for this periodic integrand).
std::complex<double> circle_period_quadrature(const Eigen::Vector2d& c, double r, const Eigen::Vector2d& m,
                                              double vol) {
  const int N = 4000;
  std::complex<double> sum = 0.0;
  for (int j = 0; j < N; ++j) {
    const double s = kTwoPi * j / N;
    const Eigen::Vector2d x = c + r * Eigen::Vector2d(std::cos(s), std::sin(s));
    sum += std::exp(std::complex<double>(0.0, x.dot(m)));
  }
  return sum * (kTwoPi * r / N) / std::sqrt(vol);
}

}  // namespace

TEST(Spectrum, CountsMatchGaussCircle) {
  const ModelManifold m = torus();
  const Submanifold h = circle(m);
  for (double lam : {0.0, 1.0, 5.0, 10.0, 30.0}) {
    EXPECT_EQ(static_cast<long long>(enumerate_spectrum(m, h, lam).items.size()), oracle::lattice_ball_count(2, lam))
        << "lambda_max=" << lam;
  }
}

TEST(Spectrum, ZeroModeHasUnitPeriod) {
  const ModelManifold m = torus();
  const SpectrumTable t = enumerate_spectrum(m, circle(m), 0.0);
  ASSERT_EQ(t.items.size(), 1u);
  EXPECT_EQ(label_string(t.items[0].label), "(0 0)");
  EXPECT_NEAR(std::abs(t.items[0].period - 1.0), 0.0, 1e-15);
}

TEST(Spectrum, SkewLatticeCountMatchesBruteForce) {
  const std::vector<double> L = {3.0, 0.5, -1.0, 4.0};
  const ModelManifold m = torus(L);
  Eigen::Matrix2d B;
  B << 3.0, 0.5, -1.0, 4.0;
  const Eigen::Matrix2d D = kTwoPi * B.inverse().transpose();  // rows: dual basis
  const double lam = 12.0;
  long long count = 0;
  for (int i = -60; i <= 60; ++i)
    for (int j = -60; j <= 60; ++j)
      if ((i * D.row(0) + j * D.row(1)).norm() <= lam) ++count;
  const SpectrumTable t = enumerate_spectrum(m, circle(m, 0.5, {1.0, 1.0}), lam);
  EXPECT_EQ(static_cast<long long>(t.items.size()), count);
}

TEST(Spectrum, CirclePeriodsMatchQuadrature) {
  const ModelManifold m = torus();
  const Submanifold h = circle(m, 0.8, {1.0, 2.5});
  for (const auto& k : std::vector<std::vector<int>>{{0, 0}, {1, 0}, {3, -4}, {-7, 2}, {12, 5}}) {
    const Eigen::Vector2d mv(k[0], k[1]);
    const std::complex<double> expect = circle_period_quadrature(Eigen::Vector2d(1.0, 2.5), 0.8, mv, m.volume());
    EXPECT_NEAR(std::abs(period_integral(m, h, k) - expect), 0.0, 1e-12) << label_string(k);
  }
}

TEST(Spectrum, PointAndSubtorusPeriods) {
  const ModelManifold m = torus();
  SubmanifoldDescriptor p;
  p.kind = SubmanifoldKind::point;
  p.anchor = {0.7, 1.9};
  const Submanifold hp = make_submanifold(m, p);
  const std::complex<double> v = period_integral(m, hp, {2, -3});
  EXPECT_NEAR(std::abs(v - std::exp(std::complex<double>(0.0, 2 * 0.7 - 3 * 1.9)) / kTwoPi), 0.0, 1e-15);

  SubmanifoldDescriptor s;
  s.kind = SubmanifoldKind::affine_subtorus;
  s.anchor = {0.0, 0.4};
  const Submanifold hs = make_submanifold(m, s);
  EXPECT_EQ(period_integral(m, hs, {1, 3}), std::complex<double>(0.0, 0.0));
  // vol^{-1/2} e^{i <a, m>} vol(H) = e^{1.2 i}
  EXPECT_NEAR(std::abs(period_integral(m, hs, {0, 3}) - std::exp(std::complex<double>(0.0, 1.2))), 0.0, 1e-14);
}

TEST(Spectrum, SpherePeriodsMatchExtendedLegendre) {
  const ModelManifold m = sphere();
  const double theta0 = 1.0;
  const Submanifold h = latitude(m, theta0);
  for (int l : {0, 1, 2, 7, 30, 51}) {
    const double expect = kTwoPi * std::sin(theta0) * std::sqrt((2.0 * l + 1.0) / (4.0 * kPi)) *
                          oracle::legendre_extended(l, std::cos(theta0));
    EXPECT_NEAR(period_integral(m, h, {l, 0}).real(), expect, 1e-13) << "l=" << l;
  }
}

TEST(Spectrum, SphereDegreesAndFolding) {
  const ModelManifold m = sphere(2.0);
  const SpectrumTable t = enumerate_spectrum(m, latitude(m, 0.5 * kPi), 10.0);
  // sqrt(l(l+1)) / 2 <= 10  ->  l <= 19
  ASSERT_EQ(t.items.size(), 20u);
  for (std::size_t l = 0; l < t.items.size(); ++l) {
    EXPECT_NEAR(t.items[l].lambda, std::sqrt(l * (l + 1.0)) / 2.0, 1e-14);
    EXPECT_EQ(t.folded_zero_items[l], static_cast<long long>(2 * l));
  }
}

TEST(Spectrum, SortedByLambdaThenLabel) {
  const ModelManifold m = torus();
  const SpectrumTable t = enumerate_spectrum(m, circle(m), 20.0);
  for (std::size_t i = 1; i < t.items.size(); ++i) {
    const auto& a = t.items[i - 1];
    const auto& b = t.items[i];
    EXPECT_TRUE(a.lambda < b.lambda || (a.lambda == b.lambda && a.label < b.label));
  }
}

TEST(Spectrum, ParallelMatchesSerial) {
  const ModelManifold m = torus();
  const Submanifold h = circle(m);
  const SpectrumTable a = enumerate_spectrum(m, h, 40.0, Executor(1));
  const SpectrumTable b = enumerate_spectrum(m, h, 40.0, Executor(4));
  EXPECT_EQ(spectrum_csv(a, "x"), spectrum_csv(b, "x"));
}

TEST(Spectrum, CapAndLabelErrors) {
  const ModelManifold m = torus();
  const Submanifold h = circle(m);
  EXPECT_THROW(enumerate_spectrum(m, h, 100.0, Executor(1), 1000.0), ConfigError);
  EXPECT_THROW(enumerate_spectrum(m, h, -1.0), ConfigError);
  EXPECT_THROW(period_integral(m, h, {1, 2, 3}), ConfigError);
  const ModelManifold s = sphere();
  EXPECT_THROW(period_integral(s, latitude(s, 1.0), {-1, 0}), ConfigError);
}

TEST(Spectrum, CsvLayout) {
  const ModelManifold m = torus();
  const std::string csv = spectrum_csv(enumerate_spectrum(m, circle(m), 1.0), "line one\nline two");
  EXPECT_EQ(csv.rfind("# line one\n# line two\nlambda,label,period_re,period_im,period_abs2\n", 0), 0u);
  EXPECT_NE(csv.find("\n1,(-1 0),"), std::string::npos);
}
