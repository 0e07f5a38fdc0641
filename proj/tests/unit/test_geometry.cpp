#include <cmath>

#include <gtest/gtest.h>

#include "klab/errors.hpp"
#include "klab/geometry.hpp"
#include "klab/numeric.hpp"

using namespace klab;

namespace {

ModelDescriptor torus(std::vector<double> lattice = {}) {
  ModelDescriptor d;
  d.lattice = std::move(lattice);
  return d;
}

ModelDescriptor sphere(double R = 1.0) {
  ModelDescriptor d;
  d.kind = ModelKind::round_sphere;
  d.radius = R;
  return d;
}

SubmanifoldDescriptor circle(double r = 1.0) {
  SubmanifoldDescriptor d;
  d.center = {kPi, kPi};
  d.r = r;
  return d;
}

SubmanifoldDescriptor latitude(double theta0) {
  SubmanifoldDescriptor d;
  d.kind = SubmanifoldKind::latitude_circle;
  d.theta0 = theta0;
  return d;
}

}  // namespace

TEST(Model, StandardTorusDualIsIdentity) {
  const ModelManifold m = make_model(torus());
  EXPECT_NEAR(m.volume(), 4.0 * kPi * kPi, 1e-12);
  EXPECT_LE((m.dual_lattice() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(m.shortest_lattice_vector(), kTwoPi, 1e-14);
}

TEST(Model, DualPairingIsTwoPiIntegral) {
  const ModelManifold m = make_model(torus({3.0, 0.5, -1.0, 4.0}));
  const Eigen::MatrixXd pairing = m.dual_lattice() * m.lattice().transpose();
  EXPECT_LE((pairing - kTwoPi * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(m.volume(), 12.5, 1e-12);
}

TEST(Model, NearestImage) {
  const ModelManifold m = make_model(torus());
  const Eigen::Vector2d d = m.nearest_image(Eigen::Vector2d(6.0, -7.0));
  EXPECT_NEAR(d(0), 6.0 - kTwoPi, 1e-14);
  EXPECT_NEAR(d(1), -7.0 + kTwoPi, 1e-14);
}

TEST(Model, RejectsInvalidDescriptions) {
  EXPECT_THROW(make_model(torus({1.0, 2.0, 2.0, 4.0})), ConfigError);
  EXPECT_THROW(make_model(torus({1.0, 2.0, 3.0})), ConfigError);
  EXPECT_THROW(make_model(sphere(0.0)), ConfigError);
  EXPECT_THROW(make_model(sphere(-1.0)), ConfigError);
  ModelDescriptor bad = sphere();
  bad.n = 3;
  EXPECT_THROW(make_model(bad), ConfigError);
}

TEST(Model, SingularLatticeMessage) {
  try {
    make_model(torus({1.0, 2.0, 2.0, 4.0}));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "singular lattice");
  }
}

TEST(Model, SphereMetricAndPoles) {
  const ModelManifold m = make_model(sphere(2.0));
  const Eigen::MatrixXd g = metric_at(m, Eigen::Vector2d(0.5, 1.0));
  EXPECT_NEAR(g(0, 0), 4.0, 1e-14);
  EXPECT_NEAR(g(1, 1), 4.0 * std::sin(0.5) * std::sin(0.5), 1e-14);
  EXPECT_NEAR(m.volume(), 16.0 * kPi, 1e-12);
  EXPECT_THROW(metric_at(m, Eigen::Vector2d(0.0, 1.0)), ConfigError);
}

TEST(Submanifold, Volumes) {
  const ModelManifold t = make_model(torus());
  EXPECT_NEAR(make_submanifold(t, circle(0.5)).volume(), kPi, 1e-14);
  SubmanifoldDescriptor p;
  p.kind = SubmanifoldKind::point;
  p.anchor = {1.0, 2.0};
  const Submanifold point = make_submanifold(t, p);
  EXPECT_EQ(point.codim(), 2);
  EXPECT_NEAR(snh_measure(point), kTwoPi, 1e-14);
  SubmanifoldDescriptor sub;
  sub.kind = SubmanifoldKind::affine_subtorus;
  sub.dim = 1;
  EXPECT_NEAR(make_submanifold(t, sub).volume(), kTwoPi, 1e-14);
  const ModelManifold s = make_model(sphere(2.0));
  EXPECT_NEAR(make_submanifold(s, latitude(1.0)).volume(), 2.0 * kTwoPi * std::sin(1.0), 1e-13);
}

TEST(Submanifold, RejectsInvalidDescriptions) {
  const ModelManifold t = make_model(torus());
  EXPECT_THROW(make_submanifold(t, circle(0.0)), ConfigError);
  EXPECT_THROW(make_submanifold(t, circle(4.0)), ConfigError);  // overlaps its translates
  EXPECT_THROW(make_submanifold(t, latitude(1.0)), ConfigError);
  const ModelManifold s = make_model(sphere());
  EXPECT_THROW(make_submanifold(s, circle()), ConfigError);
  EXPECT_THROW(make_submanifold(s, latitude(0.0)), ConfigError);
  EXPECT_THROW(make_submanifold(s, latitude(kPi)), ConfigError);
}

TEST(Conormal, LiftAnnihilatesTangentAndHasUnitNorm) {
  const ModelManifold s = make_model(sphere(1.5));
  const Submanifold h = make_submanifold(s, latitude(1.1));
  for (double sv : {0.0, 1.3, 4.0}) {
    const Eigen::VectorXd s0 = Eigen::VectorXd::Constant(1, sv);
    const AdaptedFrame f = adapted_frame(s, h, s0);
    for (double zeta : {-1.0, 1.0}) {
      const CotangentPoint z = conormal_lift(s, h, s0, Eigen::VectorXd::Constant(1, zeta));
      EXPECT_NEAR(z.xi.dot(f.tangent.col(0)), 0.0, 1e-14);
      EXPECT_NEAR(covector_norm(s, z), 1.0, 1e-14);
      const ConormalCoordinates c = locate_conormal(s, h, z);
      EXPECT_LE(c.distance, 1e-14);
      EXPECT_LE(c.tangential, 1e-14);
      EXPECT_NEAR(c.zeta(0), zeta, 1e-14);
    }
  }
}

TEST(Conormal, TangentBasisSpansLiftDerivative) {
  const ModelManifold t = make_model(torus());
  const Submanifold h = make_submanifold(t, circle());
  const Eigen::VectorXd s0 = Eigen::VectorXd::Constant(1, 0.7);
  const Eigen::VectorXd zeta = Eigen::VectorXd::Constant(1, -1.0);
  const Eigen::MatrixXd V = conormal_tangent_basis(t, h, s0, zeta);
  const double e = 1e-6;
  const CotangentPoint zp = conormal_lift(t, h, s0.array() + e, zeta);
  const CotangentPoint zm = conormal_lift(t, h, s0.array() - e, zeta);
  Eigen::VectorXd fd(4);
  fd << (zp.x - zm.x) / (2 * e), (zp.xi - zm.xi) / (2 * e);
  EXPECT_LE((V.col(0) - fd).cwiseAbs().maxCoeff(), 1e-9);
  const Eigen::MatrixXd W = off_conormal_basis(t, h, s0);
  Eigen::MatrixXd all(4, 4);
  all << V, W;
  EXPECT_GT(std::abs(all.determinant()), 1e-6);
}

TEST(ClosestPoint, CircleSignedDistance) {
  const ModelManifold t = make_model(torus());
  const Submanifold h = make_submanifold(t, circle());
  const ClosestPoint out = closest_point(t, h, Eigen::Vector2d(kPi + 1.5, kPi));
  EXPECT_NEAR(out.signed_distance, 0.5, 1e-14);
  const ClosestPoint in = closest_point(t, h, Eigen::Vector2d(kPi, kPi - 0.25));
  EXPECT_NEAR(in.signed_distance, -0.75, 1e-14);
  // A far lattice translate.
  const ClosestPoint wrap = closest_point(t, h, Eigen::Vector2d(kPi + 1.5 + 4 * kTwoPi, kPi - kTwoPi));
  EXPECT_NEAR(wrap.signed_distance, 0.5, 1e-12);
}

TEST(ClosestPoint, LatitudeDistanceIsArcLength) {
  const ModelManifold s = make_model(sphere(2.0));
  const Submanifold h = make_submanifold(s, latitude(1.0));
  const ClosestPoint c = closest_point(s, h, Eigen::Vector2d(1.3, 0.4));
  EXPECT_NEAR(c.distance, 0.6, 1e-13);
}

TEST(Quadrature, WeightsSumToMeasure) {
  const ModelManifold t = make_model(torus());
  const ModelManifold s = make_model(sphere(1.3));
  SubmanifoldDescriptor p;
  p.kind = SubmanifoldKind::point;
  p.anchor = {0.2, 0.3};
  SubmanifoldDescriptor sub;
  sub.kind = SubmanifoldKind::affine_subtorus;
  for (const auto& [model, desc] : std::vector<std::pair<ModelManifold, SubmanifoldDescriptor>>{
           {t, circle()}, {t, p}, {t, sub}, {s, latitude(0.8)}}) {
    const Submanifold h = make_submanifold(model, desc);
    const SnhQuadrature q = snh_quadrature(model, h, {32, 16});
    CompensatedSum w;
    for (const auto& node : q.nodes) {
      w.add(node.weight);
      EXPECT_NEAR(covector_norm(model, node.z), 1.0, 1e-13);
    }
    EXPECT_NEAR(w.value(), snh_measure(h), 1e-12);
    EXPECT_NEAR(q.total_measure, snh_measure(h), 1e-12);
  }
}

TEST(Quadrature, RejectsTooFewNodes) {
  const ModelManifold t = make_model(torus());
  const Submanifold h = make_submanifold(t, circle());
  EXPECT_THROW(snh_quadrature(t, h, {0, 16}), ConfigError);
}

TEST(UnitBalls, Volumes) {
  EXPECT_NEAR(unit_sphere_volume(0), 2.0, 1e-15);
  EXPECT_NEAR(unit_sphere_volume(1), kTwoPi, 1e-15);
  EXPECT_NEAR(unit_sphere_volume(2), 4.0 * kPi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-15);
  EXPECT_NEAR(unit_ball_volume(2), kPi, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * kPi / 3.0, 1e-14);
}
