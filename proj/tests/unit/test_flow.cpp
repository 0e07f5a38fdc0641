#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "klab/errors.hpp"
#include "klab/flow.hpp"
#include "klab/numeric.hpp"

using namespace klab;

namespace {

ModelManifold sphere(double R) {
  ModelDescriptor d;
  d.kind = ModelKind::round_sphere;
  d.radius = R;
  return make_model(d);
}

// Central differences of the flow map, in the standard chart.
Eigen::MatrixXd fd_tangent(const ModelManifold& m, const CotangentPoint& z, double t, const FlowOptions& o) {
  const int n = m.dim();
  Eigen::MatrixXd J(2 * n, 2 * n);
  const double e = 1e-6;
  for (int j = 0; j < 2 * n; ++j) {
    CotangentPoint a = z, b = z;
    if (j < n) {
      a.x(j) += e;
      b.x(j) -= e;
    } else {
      a.xi(j - n) += e;
      b.xi(j - n) -= e;
    }
    const CotangentPoint fa = flow(m, a, t, o), fb = flow(m, b, t, o);
    J.col(j) << (fa.x - fb.x) / (2 * e), (fa.xi - fb.xi) / (2 * e);
  }
  return J;
}

FlowOptions numeric() {
  FlowOptions o;
  o.method = FlowMethod::implicit_midpoint;
  return o;
}

}  // namespace

TEST(Flow, TorusStraightLineAtUnitSpeed) {
  const ModelManifold t = make_model({});
  const CotangentPoint z{Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(3.0, 4.0)};
  const CotangentPoint e = flow(t, z, 2.5);
  EXPECT_NEAR(e.x(0), 0.1 + 1.5, 1e-15);
  EXPECT_NEAR(e.x(1), 0.2 + 2.0, 1e-15);
  EXPECT_EQ(e.xi, z.xi);
}

TEST(Flow, GreatCircleClosesAfterTwoPiR) {
  for (double R : {1.0, 2.5}) {
    const ModelManifold s = sphere(R);
    const CotangentPoint z{Eigen::Vector2d(1.0, 0.3), Eigen::Vector2d(0.4, -0.9)};
    for (const FlowOptions& o : {FlowOptions{}, numeric()}) {
      const CotangentPoint e = flow(s, z, kTwoPi * R, o);
      EXPECT_LE(phase_distance(s, e, z), 1e-10) << "R=" << R;
    }
  }
}

TEST(Flow, EquatorAdvancesLongitude) {
  const ModelManifold s = sphere(1.0);
  const CotangentPoint z{Eigen::Vector2d(0.5 * kPi, 0.0), Eigen::Vector2d(0.0, 1.0)};
  const CotangentPoint e = flow(s, z, 1.2);
  EXPECT_NEAR(e.x(0), 0.5 * kPi, 1e-14);
  EXPECT_NEAR(e.x(1), 1.2, 1e-14);
}

TEST(Flow, TangentMatchesFiniteDifferences) {
  const ModelManifold t = make_model({});
  const ModelManifold s = sphere(1.3);
  const CotangentPoint zt{Eigen::Vector2d(0.3, 1.1), Eigen::Vector2d(-0.6, 1.7)};
  const CotangentPoint zs{Eigen::Vector2d(1.2, 0.4), Eigen::Vector2d(0.3, -0.7)};
  for (double time : {0.7, -2.9, 5.0}) {
    // Newton termination makes the integrator slightly rough at the 1e-6 probe scale.
    for (const auto& [o, tol] : {std::pair{FlowOptions{}, 1e-7}, std::pair{numeric(), 5e-6}}) {
      EXPECT_LE((tangent_flow(t, zt, time, o).m - fd_tangent(t, zt, time, o)).cwiseAbs().maxCoeff(), tol);
      EXPECT_LE((tangent_flow(s, zs, time, o).m - fd_tangent(s, zs, time, o)).cwiseAbs().maxCoeff(), tol);
    }
  }
}

TEST(Flow, SymplecticAndEnergyPreserving) {
  const ModelManifold s = sphere(1.0);
  const CotangentPoint z{Eigen::Vector2d(0.9, -0.4), Eigen::Vector2d(0.8, 0.35)};
  const double p0 = covector_norm(s, z);
  for (double time : {-10.0, -3.3, 1.0, 6.1, 10.0}) {
    EXPECT_LE(symplectic_defect(tangent_flow(s, z, time).m), 1e-12 * (1 + std::abs(time)));
    EXPECT_LE(symplectic_defect(tangent_flow(s, z, time, numeric()).m), 1e-8 * (1 + std::abs(time)));
    EXPECT_NEAR(covector_norm(s, flow(s, z, time, numeric())), p0, 1e-9 * (1 + std::abs(time)));
    EXPECT_LE(phase_distance(s, flow(s, z, time, numeric()), flow(s, z, time)), 1e-7);
  }
}

TEST(Flow, HomogeneousOfDegreeZeroInSpeed) {
  const ModelManifold s = sphere(1.0);
  const CotangentPoint z{Eigen::Vector2d(0.9, -0.4), Eigen::Vector2d(0.8, 0.35)};
  CotangentPoint z3 = z;
  z3.xi *= 3.0;
  const CotangentPoint a = flow(s, z, 2.0), b = flow(s, z3, 2.0);
  EXPECT_LE((a.x - b.x).norm(), 1e-13);
  EXPECT_LE((3.0 * a.xi - b.xi).norm(), 1e-12);
}

TEST(Flow, SecondOrderSchemeIsLessAccurate) {
  const ModelManifold s = sphere(1.0);
  const CotangentPoint z{Eigen::Vector2d(0.9, -0.4), Eigen::Vector2d(0.8, 0.35)};
  FlowOptions o2 = numeric();
  o2.order = 2;
  const double e2 = phase_distance(s, flow(s, z, 3.0, o2), flow(s, z, 3.0));
  const double e4 = phase_distance(s, flow(s, z, 3.0, numeric()), flow(s, z, 3.0));
  EXPECT_GT(e2, 1e-9);
  EXPECT_LT(e4, 1e-11);
}

TEST(NumericPath, IncrementalMatchesDirect) {
  const ModelManifold s = sphere(1.0);
  const CotangentPoint z{Eigen::Vector2d(0.9, -0.4), Eigen::Vector2d(0.8, 0.35)};
  NumericPath path(s, z, numeric(), true);
  path.advance(1.0);
  path.advance(1.5);
  EXPECT_DOUBLE_EQ(path.time(), 2.5);
  EXPECT_LE(phase_distance(s, path.point(), flow(s, z, 2.5)), 1e-11);
  EXPECT_LE((path.tangent() - tangent_flow(s, z, 2.5).m).cwiseAbs().maxCoeff(), 1e-9);
  NumericPath copy = path;
  copy.advance(-2.5);
  EXPECT_LE(phase_distance(s, copy.point(), z), 1e-11);
  EXPECT_DOUBLE_EQ(path.time(), 2.5);
}

TEST(Flow, RejectsInvalidInput) {
  const ModelManifold t = make_model({});
  const CotangentPoint zero{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.0, 0.0)};
  EXPECT_THROW(flow(t, zero, 1.0), std::invalid_argument);
  const CotangentPoint z{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 0.0)};
  FlowOptions bad = numeric();
  bad.step = 0.0;
  EXPECT_THROW(flow(t, z, 1.0, bad), ConfigError);
  bad = numeric();
  bad.order = 3;
  EXPECT_THROW(flow(t, z, 1.0, bad), ConfigError);
}

TEST(Symplectic, MatrixAndDefect) {
  const Eigen::MatrixXd J = symplectic_matrix(2);
  EXPECT_DOUBLE_EQ(J(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(J(2, 0), -1.0);
  EXPECT_DOUBLE_EQ(symplectic_defect(Eigen::MatrixXd::Identity(4, 4)), 0.0);
  EXPECT_GT(symplectic_defect(2.0 * Eigen::MatrixXd::Identity(4, 4)), 1.0);
}
