#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace klab {

enum class ModelKind { flat_torus, round_sphere };
enum class SubmanifoldKind { embedded_circle, affine_subtorus, point, latitude_circle };

std::string to_string(ModelKind kind);
std::string to_string(SubmanifoldKind kind);
ModelKind parse_model_kind(const std::string& text);
SubmanifoldKind parse_submanifold_kind(const std::string& text);

/// Plain description of a model geometry, as read from a config.
struct ModelDescriptor {
  ModelKind kind = ModelKind::flat_torus;
  int n = 2;
  /// Row-major n*n lattice basis (rows are the lattice vectors). Empty means 2*pi*I.
  std::vector<double> lattice;
  double radius = 1.0;

  bool operator==(const ModelDescriptor&) const = default;
};

struct SubmanifoldDescriptor {
  SubmanifoldKind kind = SubmanifoldKind::embedded_circle;
  std::vector<double> center;  // embedded-circle; empty means the origin
  double r = 1.0;
  double theta0 = 1.57079632679489661923;  // latitude-circle co-latitude
  std::vector<double> anchor;              // point / affine-subtorus; empty means the origin
  int dim = 1;                             // affine-subtorus dimension

  bool operator==(const SubmanifoldDescriptor&) const = default;
};

/// Point of T*M in chart coordinates. Torus: Euclidean coordinates of the
/// covering space (never reduced by the flow). Sphere: (theta, phi) polar chart.
struct CotangentPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd xi;
};

/// Validated model manifold: a flat torus R^n / L or the round 2-sphere.
class ModelManifold {
 public:
  ModelKind kind() const { return kind_; }
  int dim() const { return n_; }
  const ModelDescriptor& descriptor() const { return descriptor_; }

  /// Rows are lattice vectors (torus only).
  const Eigen::MatrixXd& lattice() const { return lattice_; }
  /// Rows are a basis of the dual lattice {m : <m, b> in 2*pi*Z}.
  const Eigen::MatrixXd& dual_lattice() const { return dual_; }
  double radius() const { return radius_; }
  double volume() const { return volume_; }
  double shortest_lattice_vector() const { return shortest_; }

  /// Minimal-image representative of a displacement (torus only).
  Eigen::VectorXd nearest_image(const Eigen::VectorXd& dx) const;
  /// Integer lattice coordinates k with x = sum_i k_i b_i + (cell remainder).
  Eigen::VectorXd lattice_coordinates(const Eigen::VectorXd& x) const;

 private:
  friend ModelManifold make_model(const ModelDescriptor& desc);

  ModelKind kind_ = ModelKind::flat_torus;
  int n_ = 2;
  ModelDescriptor descriptor_;
  Eigen::MatrixXd lattice_;
  Eigen::MatrixXd lattice_inv_t_;
  Eigen::MatrixXd dual_;
  double radius_ = 1.0;
  double volume_ = 0.0;
  double shortest_ = 0.0;
};

ModelManifold make_model(const ModelDescriptor& desc);

/// Metric tensor g_ij at a chart point. Throws ConfigError at the sphere poles.
Eigen::MatrixXd metric_at(const ModelManifold& model, const Eigen::VectorXd& x);
Eigen::MatrixXd inverse_metric_at(const ModelManifold& model, const Eigen::VectorXd& x);

/// Principal symbol p(x, xi) = |xi|_g.
double covector_norm(const ModelManifold& model, const CotangentPoint& z);

/// Embedded submanifold H with its parametrization by s in [0, 2*pi)^d.
class Submanifold {
 public:
  SubmanifoldKind kind() const { return kind_; }
  int dim() const { return d_; }
  int ambient_dim() const { return n_; }
  int codim() const { return n_ - d_; }
  const SubmanifoldDescriptor& descriptor() const { return descriptor_; }

  const Eigen::VectorXd& center() const { return center_; }
  double radius() const { return r_; }
  double theta0() const { return theta0_; }
  const Eigen::VectorXd& anchor() const { return anchor_; }
  /// Columns are the lattice vectors spanning an affine subtorus.
  const Eigen::MatrixXd& span() const { return span_; }
  /// Orthonormal tangent (first d columns) and normal (last n-d columns) frame
  /// of an affine subtorus; constant along H.
  const Eigen::MatrixXd& subtorus_frame() const { return frame_; }

  /// vol(H) from the closed form.
  double volume() const { return volume_; }
  /// Length scale below which two distinct conormal crossings cannot occur.
  double injectivity_scale() const { return injectivity_; }

 private:
  friend Submanifold make_submanifold(const ModelManifold& model, const SubmanifoldDescriptor& desc);

  SubmanifoldKind kind_ = SubmanifoldKind::embedded_circle;
  int d_ = 1;
  int n_ = 2;
  SubmanifoldDescriptor descriptor_;
  Eigen::VectorXd center_;
  double r_ = 1.0;
  double theta0_ = 0.0;
  Eigen::VectorXd anchor_;
  Eigen::MatrixXd span_;
  Eigen::MatrixXd frame_;
  double volume_ = 0.0;
  double injectivity_ = 0.0;
};

Submanifold make_submanifold(const ModelManifold& model, const SubmanifoldDescriptor& desc);

/// Point of H with g-orthonormal tangent and normal frames (columns).
struct AdaptedFrame {
  Eigen::VectorXd point;
  Eigen::MatrixXd tangent;  // n x d
  Eigen::MatrixXd normal;   // n x (n-d)
  /// |g_H|^{1/2} of the s-parametrization.
  double area_element = 0.0;
};

AdaptedFrame adapted_frame(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& s);

/// The conormal chart (s, zeta) -> (x(s), sum_k zeta_k nu_k(s)^flat) of N*H.
CotangentPoint conormal_lift(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& s,
                             const Eigen::VectorXd& zeta);

/// 2n x n matrix whose columns d/ds_a, d/dzeta_k span T(N*H) at the chart point.
Eigen::MatrixXd conormal_tangent_basis(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& s,
                                       const Eigen::VectorXd& zeta);

/// 2n x n complement of T(N*H): normal position offsets (nu_k, 0) followed by
/// tangential covector offsets (0, e_a^flat).
Eigen::MatrixXd off_conormal_basis(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& s);

/// Nearest-point data of a chart point relative to H.
struct ClosestPoint {
  Eigen::VectorXd s;
  /// Displacement from the foot point to x, in chart components (minimal image on the torus).
  Eigen::VectorXd offset;
  double distance = 0.0;
  /// Signed distance for hypersurfaces (positive along nu_1); equals distance otherwise.
  double signed_distance = 0.0;
};

ClosestPoint closest_point(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& x);

/// Conormal coordinates of a covector near N*H.
struct ConormalCoordinates {
  Eigen::VectorXd s;
  Eigen::VectorXd zeta;
  double distance = 0.0;
  /// |xi restricted to T_x H| / p(x, xi).
  double tangential = 0.0;
};

ConormalCoordinates locate_conormal(const ModelManifold& model, const Submanifold& h, const CotangentPoint& z);

/// Node of the product rule on SN*H.
struct SnhNode {
  CotangentPoint z;
  double weight = 0.0;
  Eigen::VectorXd s;
  Eigen::VectorXd zeta;  // unit vector in the normal frame
};

struct SnhResolution {
  int h_nodes = 256;      // per periodic H dimension
  int fiber_nodes = 64;   // on S^{n-d-1} when n-d >= 2
};

struct SnhQuadrature {
  std::vector<SnhNode> nodes;
  double total_measure = 0.0;
};

SnhQuadrature snh_quadrature(const ModelManifold& model, const Submanifold& h, const SnhResolution& resolution);

/// |SN*H| = vol(H) vol(S^{n-d-1}) in closed form.
double snh_measure(const Submanifold& h);

double unit_sphere_volume(int k);  // vol(S^k)
double unit_ball_volume(int k);    // vol(B^k)

/// Distance between two points of SN*H (torus: minimal image; sphere: in the
/// R^3 embedding with covectors as tangent vectors).
double phase_distance(const ModelManifold& model, const CotangentPoint& a, const CotangentPoint& b);

}  // namespace klab
