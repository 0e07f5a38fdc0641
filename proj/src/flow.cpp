#include "klab/flow.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/AutoDiff>

#include "klab/errors.hpp"
#include "klab/sphere_chart.hpp"

namespace klab {
namespace {

using AD4 = Eigen::AutoDiffScalar<Eigen::Vector4d>;

// Small fixed-capacity storage keeps the integrator allocation-free for n <= 4.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;

std::array<AD4, 4> seed(const Eigen::Vector4d& z) {
  std::array<AD4, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = AD4(z(i), 4, i);
  return out;
}

Eigen::Matrix4d jacobian_of(const std::array<AD4, 4>& f) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i) m.row(i) = f[i].derivatives().transpose();
  return m;
}

template <class S>
std::array<S, 4> sphere_closed_flow(const std::array<S, 4>& z, double t, double r) {
  const auto e = sphere::embed(z[0], z[1], z[2], z[3], r);
  return sphere::chart(sphere::great_circle(e, t, r), r);
}

template <class S>
std::array<S, 4> sphere_rechart(const std::array<S, 4>& z, double r, int axis, bool to_rotated) {
  auto e = sphere::embed(z[0], z[1], z[2], z[3], r);
  if (to_rotated) {
    e.X = sphere::rotate_axis_to_z(e.X, axis);
    e.U = sphere::rotate_axis_to_z(e.U, axis);
  } else {
    e.X = sphere::rotate_z_to_axis(e.X, axis);
    e.U = sphere::rotate_z_to_axis(e.U, axis);
  }
  return sphere::chart(e, r);
}

Eigen::Vector4d as_vector4(const CotangentPoint& z) { return {z.x(0), z.x(1), z.xi(0), z.xi(1)}; }

CotangentPoint from_vector4(const Eigen::Vector4d& v) {
  return {Eigen::Vector2d(v(0), v(1)), Eigen::Vector2d(v(2), v(3))};
}

void require_nonzero(const ModelManifold& model, const CotangentPoint& z) {
  const double p = covector_norm(model, z);
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("flow: zero covector");
}

// Vector field F = (dp/dxi, -dp/dx) of p = |xi|_g and its Jacobian, in the
// integration chart.
void hamiltonian_field(ModelKind kind, double r, int n, const Vec& z, Vec& f, Mat* df) {
  Vec grad(2 * n);
  Mat hess;
  if (kind == ModelKind::flat_torus) {
    const auto xi = z.tail(n);
    const double p = xi.norm();
    grad.head(n).setZero();
    grad.tail(n) = xi / p;
    if (df) {
      hess = Mat::Zero(2 * n, 2 * n);
      hess.bottomRightCorner(n, n) =
          (Mat::Identity(n, n) - xi * xi.transpose() / (p * p)) / p;
    }
  } else {
    const double s = std::sin(z(0)), c = std::cos(z(0));
    const double a = z(2), b = z(3);
    const double r2 = r * r;
    const double s2 = s * s;
    const double h2 = (a * a + b * b / s2) / (2.0 * r2);
    const double p = std::sqrt(2.0 * h2);
    Vec g2(4);
    g2 << -b * b * c / (r2 * s2 * s), 0.0, a / r2, b / (r2 * s2);
    grad = g2 / p;
    if (df) {
      Mat hh = Mat::Zero(4, 4);
      hh(0, 0) = b * b * (1.0 / s2 + 3.0 * c * c / (s2 * s2)) / r2;
      hh(0, 3) = hh(3, 0) = -2.0 * b * c / (r2 * s2 * s);
      hh(2, 2) = 1.0 / r2;
      hh(3, 3) = 1.0 / (r2 * s2);
      hess = hh / p - g2 * g2.transpose() / (p * p * p);
    }
  }
  f.resize(2 * n);
  f.head(n) = grad.tail(n);
  f.tail(n) = -grad.head(n);
  if (df) {
    df->resize(2 * n, 2 * n);
    df->topRows(n) = hess.bottomRows(n);
    df->bottomRows(n) = -hess.topRows(n);
  }
}

}  // namespace

Eigen::MatrixXd symplectic_matrix(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return j;
}

double symplectic_defect(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd j = symplectic_matrix(static_cast<int>(m.rows() / 2));
  return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// NumericPath

struct NumericPath::Impl {
  ModelKind kind;
  int n;
  double r;
  FlowOptions options;
  bool with_tangent;
  int axis = 2;
  double t = 0.0;
  Vec z;      // integration-chart state
  Mat m;      // d z / d z0 in the integration chart
  Mat d_in;   // d z0_chart / d z0_standard

  void step(double h) {
    const int dim = 2 * n;
    Vec f(dim);
    Mat df(dim, dim);
    Vec z1 = z;
    hamiltonian_field(kind, r, n, z, f, nullptr);
    z1 += h * f;
    const Mat eye = Mat::Identity(dim, dim);
    for (int it = 0;; ++it) {
      const Vec mid = 0.5 * (z + z1);
      hamiltonian_field(kind, r, n, mid, f, &df);
      const Vec g = z1 - z - h * f;
      const Mat a = eye - 0.5 * h * df;
      const Vec delta = a.partialPivLu().solve(g);
      z1 -= delta;
      if (delta.lpNorm<Eigen::Infinity>() <= 4e-16 * (1.0 + z1.lpNorm<Eigen::Infinity>())) break;
      if (it > 60) throw NumericalError("implicit midpoint: Newton iteration did not converge");
    }
    if (with_tangent) {
      const Vec mid = 0.5 * (z + z1);
      hamiltonian_field(kind, r, n, mid, f, &df);
      const Mat a = eye - 0.5 * h * df;
      const Mat b = eye + 0.5 * h * df;
      m = a.partialPivLu().solve(b * m);
    }
    z = z1;
  }

  void composed_step(double h) {
    if (options.order == 2) {
      step(h);
      return;
    }
    const double cbrt2 = std::cbrt(2.0);
    const double g1 = 1.0 / (2.0 - cbrt2);
    const double g2 = -cbrt2 / (2.0 - cbrt2);
    step(g1 * h);
    step(g2 * h);
    step(g1 * h);
  }
};

NumericPath::NumericPath(const ModelManifold& model, const CotangentPoint& start, const FlowOptions& options,
                         bool with_tangent)
    : impl_(std::make_unique<Impl>()) {
  require_nonzero(model, start);
  if (!(options.step > 0.0 && options.step <= 1e-3)) throw ConfigError("integrator step must lie in (0, 1e-3]");
  if (options.order != 2 && options.order != 4) throw ConfigError("integrator order must be 2 or 4");
  Impl& s = *impl_;
  s.kind = model.kind();
  s.n = model.dim();
  s.r = model.radius();
  s.options = options;
  s.with_tangent = with_tangent;
  const int dim = 2 * s.n;
  s.m = Mat::Identity(dim, dim);
  s.z.resize(dim);
  if (s.kind == ModelKind::flat_torus) {
    s.z.head(s.n) = start.x;
    s.z.tail(s.n) = start.xi;
    s.d_in = Mat::Identity(dim, dim);
    return;
  }
  // Pick the relabelled polar chart whose pole axis is closest to the normal of
  // the great circle.
  const auto e = sphere::embed(start.x(0), start.x(1), start.xi(0), start.xi(1), s.r);
  const Eigen::Vector3d x(e.X[0], e.X[1], e.X[2]);
  const Eigen::Vector3d u(e.U[0], e.U[1], e.U[2]);
  const Eigen::Vector3d normal = x.cross(u);
  normal.cwiseAbs().maxCoeff(&s.axis);
  const auto zin = seed(as_vector4(start));
  const auto zb = sphere_rechart(zin, s.r, s.axis, true);
  for (int i = 0; i < 4; ++i) s.z(i) = zb[i].value();
  s.d_in = jacobian_of(zb);
}

NumericPath::~NumericPath() = default;

NumericPath::NumericPath(const NumericPath& other) : impl_(std::make_unique<Impl>(*other.impl_)) {}

NumericPath& NumericPath::operator=(const NumericPath& other) {
  if (this != &other) impl_ = std::make_unique<Impl>(*other.impl_);
  return *this;
}

void NumericPath::advance(double dt) {
  Impl& s = *impl_;
  const double h = s.options.step;
  const double sign = dt < 0 ? -1.0 : 1.0;
  const double span = std::abs(dt);
  const auto full = static_cast<long long>(std::floor(span / h));
  for (long long i = 0; i < full; ++i) s.composed_step(sign * h);
  const double rest = span - static_cast<double>(full) * h;
  if (rest > 1e-15) s.composed_step(sign * rest);
  s.t += dt;
}

double NumericPath::time() const { return impl_->t; }

CotangentPoint NumericPath::point() const {
  const Impl& s = *impl_;
  if (s.kind == ModelKind::flat_torus) return {s.z.head(s.n), s.z.tail(s.n)};
  const std::array<double, 4> zb = {s.z(0), s.z(1), s.z(2), s.z(3)};
  const auto za = sphere_rechart(zb, s.r, s.axis, false);
  return from_vector4(Eigen::Vector4d(za[0], za[1], za[2], za[3]));
}

Eigen::MatrixXd NumericPath::chart_tangent() const {
  const Impl& s = *impl_;
  if (!s.with_tangent) throw std::logic_error("NumericPath: tangent not tracked");
  return s.m * s.d_in;
}

Eigen::MatrixXd NumericPath::tangent() const {
  const Impl& s = *impl_;
  const Eigen::MatrixXd inner = chart_tangent();
  if (s.kind == ModelKind::flat_torus) return inner;
  const auto zb = seed(Eigen::Vector4d(s.z(0), s.z(1), s.z(2), s.z(3)));
  const Eigen::Matrix4d d_out = jacobian_of(sphere_rechart(zb, s.r, s.axis, false));
  return d_out * inner;
}

Eigen::VectorXd NumericPath::chart_velocity() const {
  const Impl& s = *impl_;
  Vec f;
  hamiltonian_field(s.kind, s.r, s.n, s.z, f, nullptr);
  return f.head(s.n);
}

// ---------------------------------------------------------------------------

CotangentPoint flow(const ModelManifold& model, const CotangentPoint& z, double t, const FlowOptions& options) {
  if (options.method == FlowMethod::implicit_midpoint) {
    NumericPath path(model, z, options, false);
    path.advance(t);
    return path.point();
  }
  require_nonzero(model, z);
  if (model.kind() == ModelKind::flat_torus) {
    return {z.x + (t / z.xi.norm()) * z.xi, z.xi};
  }
  const std::array<double, 4> in = {z.x(0), z.x(1), z.xi(0), z.xi(1)};
  const auto out = sphere_closed_flow(in, t, model.radius());
  return from_vector4(Eigen::Vector4d(out[0], out[1], out[2], out[3]));
}

TangentFlowMatrix tangent_flow(const ModelManifold& model, const CotangentPoint& z, double t,
                               const FlowOptions& options) {
  if (options.method == FlowMethod::implicit_midpoint) {
    NumericPath path(model, z, options, true);
    path.advance(t);
    return {path.tangent()};
  }
  require_nonzero(model, z);
  const int n = model.dim();
  if (model.kind() == ModelKind::flat_torus) {
    const double p = z.xi.norm();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    m.topRightCorner(n, n) =
        t * (Eigen::MatrixXd::Identity(n, n) / p - z.xi * z.xi.transpose() / (p * p * p));
    return {m};
  }
  const auto out = sphere_closed_flow(seed(as_vector4(z)), t, model.radius());
  return {jacobian_of(out)};
}

}  // namespace klab
