#pragma once

#include <memory>

#include <Eigen/Dense>

#include "klab/geometry.hpp"

namespace klab {

enum class FlowMethod { closed_form, implicit_midpoint };

struct FlowOptions {
  FlowMethod method = FlowMethod::closed_form;
  /// Fixed step of the implicit midpoint integrator (the last step of an
  /// integration is shortened to land exactly on the requested time).
  double step = 1e-3;
  /// 2: plain implicit midpoint. 4: symmetric triple-jump composition of
  /// implicit-midpoint substeps.
  int order = 4;
};

/// Matrix of dG^t in canonical chart coordinates (x, xi), size 2n x 2n.
struct TangentFlowMatrix {
  Eigen::MatrixXd m;
};

/// Homogeneous geodesic flow G^t of p(x, xi) = |xi|_g.
/// Throws std::invalid_argument for a zero covector.
CotangentPoint flow(const ModelManifold& model, const CotangentPoint& z, double t, const FlowOptions& options = {});

TangentFlowMatrix tangent_flow(const ModelManifold& model, const CotangentPoint& z, double t,
                               const FlowOptions& options = {});

/// Standard symplectic matrix [[0, I], [-I, 0]] of size 2n.
Eigen::MatrixXd symplectic_matrix(int n);

/// max-norm of M^T J M - J.
double symplectic_defect(const Eigen::MatrixXd& m);

/// Incrementally integrated trajectory of the implicit-midpoint scheme.
///
/// On the sphere the integration runs in the polar chart (one of three
/// cyclically relabelled ones) that keeps the great circle farthest from the
/// chart poles; point() and tangent() are mapped back to the standard chart.
class NumericPath {
 public:
  NumericPath(const ModelManifold& model, const CotangentPoint& start, const FlowOptions& options, bool with_tangent);
  ~NumericPath();
  NumericPath(const NumericPath& other);
  NumericPath& operator=(const NumericPath& other);

  /// Integrate by a signed time increment.
  void advance(double dt);
  double time() const;

  CotangentPoint point() const;
  /// d z(t) / d z(0) in the standard chart. Requires with_tangent.
  Eigen::MatrixXd tangent() const;
  /// d z_chart(t) / d z(0), with z_chart the integration chart. Requires with_tangent.
  Eigen::MatrixXd chart_tangent() const;
  /// Base-point velocity dx/dt in the integration chart.
  Eigen::VectorXd chart_velocity() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace klab
