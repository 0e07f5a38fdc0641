#include "klab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "klab/errors.hpp"
#include "klab/numeric.hpp"
#include "klab/special_functions.hpp"
#include "klab/sphere_chart.hpp"

namespace klab {
namespace {

constexpr double kPoleMargin = 1e-3;

Eigen::VectorXd to_vector(const std::vector<double>& v, int n, const char* what) {
  if (v.empty()) return Eigen::VectorXd::Zero(n);
  if (static_cast<int>(v.size()) != n) throw ConfigError(std::string(what) + " has wrong dimension");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

// Visits every k in {-1,0,1}^m.
template <class F>
void for_each_neighbour(int m, F&& f) {
  Eigen::VectorXd k = Eigen::VectorXd::Constant(m, -1.0);
  while (true) {
    f(k);
    int i = 0;
    while (i < m && k(i) == 1.0) {
      k(i) = -1.0;
      ++i;
    }
    if (i == m) return;
    k(i) += 1.0;
  }
}

}  // namespace

std::string to_string(ModelKind kind) {
  return kind == ModelKind::flat_torus ? "flat-torus" : "round-sphere";
}

std::string to_string(SubmanifoldKind kind) {
  switch (kind) {
    case SubmanifoldKind::embedded_circle: return "embedded-circle";
    case SubmanifoldKind::affine_subtorus: return "affine-subtorus";
    case SubmanifoldKind::point: return "point";
    case SubmanifoldKind::latitude_circle: return "latitude-circle";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "flat-torus") return ModelKind::flat_torus;
  if (text == "round-sphere") return ModelKind::round_sphere;
  throw ConfigError("unknown model.kind '" + text + "'");
}

SubmanifoldKind parse_submanifold_kind(const std::string& text) {
  if (text == "embedded-circle") return SubmanifoldKind::embedded_circle;
  if (text == "affine-subtorus") return SubmanifoldKind::affine_subtorus;
  if (text == "point") return SubmanifoldKind::point;
  if (text == "latitude-circle") return SubmanifoldKind::latitude_circle;
  throw ConfigError("unknown h.kind '" + text + "'");
}

// ---------------------------------------------------------------------------
// ModelManifold

ModelManifold make_model(const ModelDescriptor& desc) {
  ModelManifold m;
  m.kind_ = desc.kind;
  m.n_ = desc.n;
  m.descriptor_ = desc;
  if (desc.kind == ModelKind::round_sphere) {
    if (desc.n != 2) throw ConfigError("unsupported model: round-sphere requires n=2");
    if (!(desc.radius > 0.0) || !std::isfinite(desc.radius)) throw ConfigError("sphere radius must be positive");
    m.radius_ = desc.radius;
    m.volume_ = 4.0 * kPi * desc.radius * desc.radius;
    return m;
  }
  if (desc.n < 2) throw ConfigError("unsupported model: flat-torus requires n>=2");
  const int n = desc.n;
  if (desc.lattice.empty()) {
    m.lattice_ = kTwoPi * Eigen::MatrixXd::Identity(n, n);
  } else {
    if (static_cast<int>(desc.lattice.size()) != n * n) throw ConfigError("lattice must have n*n entries");
    m.lattice_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        desc.lattice.data(), n, n);
  }
  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale *= m.lattice_.row(i).norm();
  const double det = m.lattice_.determinant();
  if (!std::isfinite(det) || std::abs(det) <= 1e-12 * scale || scale == 0.0) throw ConfigError("singular lattice");
  m.volume_ = std::abs(det);
  m.lattice_inv_t_ = m.lattice_.transpose().inverse();
  m.dual_ = kTwoPi * m.lattice_.inverse().transpose();
  // Shortest vector by enumeration over a small coefficient box; adequate for
  // the reduced bases used here.
  const int reach = n <= 3 ? 3 : 1;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXi k = Eigen::VectorXi::Constant(n, -reach);
  while (true) {
    if (!k.isZero()) best = std::min(best, (m.lattice_.transpose() * k.cast<double>()).norm());
    int i = 0;
    while (i < n && k(i) == reach) {
      k(i) = -reach;
      ++i;
    }
    if (i == n) break;
    ++k(i);
  }
  m.shortest_ = best;
  return m;
}

Eigen::VectorXd ModelManifold::lattice_coordinates(const Eigen::VectorXd& x) const {
  return lattice_inv_t_ * x;
}

Eigen::VectorXd ModelManifold::nearest_image(const Eigen::VectorXd& dx) const {
  const Eigen::VectorXd u = lattice_inv_t_ * dx;
  const Eigen::VectorXd base = u.array().round().matrix();
  Eigen::VectorXd best = dx - lattice_.transpose() * base;
  double best_norm = best.squaredNorm();
  for_each_neighbour(n_, [&](const Eigen::VectorXd& k) {
    const Eigen::VectorXd cand = dx - lattice_.transpose() * (base + k);
    const double c = cand.squaredNorm();
    if (c < best_norm) {
      best_norm = c;
      best = cand;
    }
  });
  return best;
}

Eigen::MatrixXd metric_at(const ModelManifold& model, const Eigen::VectorXd& x) {
  if (model.kind() == ModelKind::flat_torus) return Eigen::MatrixXd::Identity(model.dim(), model.dim());
  const double st = std::sin(x(0));
  if (std::abs(st) < 1e-12) throw ConfigError("point outside chart (sphere pole)");
  const double r2 = model.radius() * model.radius();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
  g(0, 0) = r2;
  g(1, 1) = r2 * st * st;
  return g;
}

Eigen::MatrixXd inverse_metric_at(const ModelManifold& model, const Eigen::VectorXd& x) {
  if (model.kind() == ModelKind::flat_torus) return Eigen::MatrixXd::Identity(model.dim(), model.dim());
  const Eigen::MatrixXd g = metric_at(model, x);
  Eigen::MatrixXd gi = Eigen::MatrixXd::Zero(2, 2);
  gi(0, 0) = 1.0 / g(0, 0);
  gi(1, 1) = 1.0 / g(1, 1);
  return gi;
}

double covector_norm(const ModelManifold& model, const CotangentPoint& z) {
  if (model.kind() == ModelKind::flat_torus) return z.xi.norm();
  const double st = std::sin(z.x(0));
  const double r = model.radius();
  return std::sqrt(z.xi(0) * z.xi(0) + z.xi(1) * z.xi(1) / (st * st)) / r;
}

// ---------------------------------------------------------------------------
// Submanifold

Submanifold make_submanifold(const ModelManifold& model, const SubmanifoldDescriptor& desc) {
  Submanifold h;
  h.kind_ = desc.kind;
  h.descriptor_ = desc;
  h.n_ = model.dim();
  const int n = model.dim();
  const bool torus = model.kind() == ModelKind::flat_torus;
  switch (desc.kind) {
    case SubmanifoldKind::embedded_circle: {
      if (!torus || n != 2) throw ConfigError("embedded-circle requires a 2-dimensional flat torus");
      if (!(desc.r > 0.0)) throw ConfigError("circle radius must be positive");
      if (!(desc.r < 0.49 * model.shortest_lattice_vector()))
        throw ConfigError("circle radius must be below 0.49 * shortest lattice vector");
      h.d_ = 1;
      h.center_ = to_vector(desc.center, n, "h.center");
      h.r_ = desc.r;
      h.volume_ = kTwoPi * desc.r;
      h.injectivity_ = desc.r;
      break;
    }
    case SubmanifoldKind::affine_subtorus: {
      if (!torus) throw ConfigError("affine-subtorus requires a flat torus");
      if (desc.dim < 1 || desc.dim >= n) throw ConfigError("affine-subtorus dimension must satisfy 1 <= h.dim < n");
      h.d_ = desc.dim;
      h.anchor_ = to_vector(desc.anchor, n, "h.anchor");
      h.span_ = model.lattice().topRows(desc.dim).transpose();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(h.span_);
      h.frame_ = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
      h.volume_ = std::sqrt((h.span_.transpose() * h.span_).determinant());
      // Spacing between parallel translates: shortest normal component of the
      // remaining lattice vectors.
      const Eigen::MatrixXd normal = h.frame_.rightCols(n - h.d_);
      double gap = std::numeric_limits<double>::infinity();
      for (int i = h.d_; i < n; ++i) gap = std::min(gap, (normal.transpose() * model.lattice().row(i).transpose()).norm());
      h.injectivity_ = gap / 2.0;
      break;
    }
    case SubmanifoldKind::point: {
      if (!torus) throw ConfigError("point submanifold requires a flat torus");
      h.d_ = 0;
      h.anchor_ = to_vector(desc.anchor, n, "h.anchor");
      h.volume_ = 1.0;
      h.injectivity_ = model.shortest_lattice_vector() / 2.0;
      break;
    }
    case SubmanifoldKind::latitude_circle: {
      if (torus) throw ConfigError("latitude-circle requires the round sphere");
      if (!(desc.theta0 >= kPoleMargin && desc.theta0 <= kPi - kPoleMargin))
        throw ConfigError("latitude co-latitude must keep a 1e-3 pole margin");
      h.d_ = 1;
      h.theta0_ = desc.theta0;
      h.r_ = model.radius();
      h.volume_ = kTwoPi * model.radius() * std::sin(desc.theta0);
      h.injectivity_ = kPi * model.radius() * std::min(desc.theta0, kPi - desc.theta0) / kPi;
      break;
    }
  }
  return h;
}

AdaptedFrame adapted_frame(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& s) {
  const int n = model.dim();
  const int d = h.dim();
  if (s.size() != d) throw ConfigError("H parameter has wrong dimension");
  AdaptedFrame f;
  switch (h.kind()) {
    case SubmanifoldKind::embedded_circle: {
      const double c = std::cos(s(0)), sn = std::sin(s(0));
      f.point = h.center() + h.radius() * Eigen::Vector2d(c, sn);
      f.tangent = Eigen::Vector2d(-sn, c);
      f.normal = Eigen::Vector2d(c, sn);
      f.area_element = h.radius();
      break;
    }
    case SubmanifoldKind::affine_subtorus: {
      f.point = h.anchor() + h.span() * s / kTwoPi;
      f.tangent = h.subtorus_frame().leftCols(d);
      f.normal = h.subtorus_frame().rightCols(n - d);
      f.area_element = h.volume() / std::pow(kTwoPi, d);
      break;
    }
    case SubmanifoldKind::point: {
      f.point = h.anchor();
      f.tangent = Eigen::MatrixXd(n, 0);
      f.normal = Eigen::MatrixXd::Identity(n, n);
      f.area_element = 1.0;
      break;
    }
    case SubmanifoldKind::latitude_circle: {
      const double r = model.radius();
      f.point = Eigen::Vector2d(h.theta0(), s(0));
      f.tangent = Eigen::Vector2d(0.0, 1.0 / (r * std::sin(h.theta0())));
      f.normal = Eigen::Vector2d(1.0 / r, 0.0);
      f.area_element = r * std::sin(h.theta0());
      break;
    }
  }
  return f;
}

CotangentPoint conormal_lift(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& s,
                             const Eigen::VectorXd& zeta) {
  const AdaptedFrame f = adapted_frame(model, h, s);
  const Eigen::MatrixXd g = metric_at(model, f.point);
  return {f.point, g * (f.normal * zeta)};
}

Eigen::MatrixXd conormal_tangent_basis(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& s,
                                       const Eigen::VectorXd& zeta) {
  const int n = model.dim();
  const int d = h.dim();
  const AdaptedFrame f = adapted_frame(model, h, s);
  const Eigen::MatrixXd g = metric_at(model, f.point);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(2 * n, n);
  switch (h.kind()) {
    case SubmanifoldKind::embedded_circle: {
      const Eigen::Vector2d t(-std::sin(s(0)), std::cos(s(0)));
      basis.col(0) << h.radius() * t, zeta(0) * t;
      break;
    }
    case SubmanifoldKind::affine_subtorus: {
      for (int a = 0; a < d; ++a) basis.col(a).head(n) = h.span().col(a) / kTwoPi;
      break;
    }
    case SubmanifoldKind::point:
      break;
    case SubmanifoldKind::latitude_circle: {
      basis(1, 0) = 1.0;  // d phi
      break;
    }
  }
  for (int k = 0; k < n - d; ++k) basis.col(d + k).tail(n) = g * f.normal.col(k);
  return basis;
}

Eigen::MatrixXd off_conormal_basis(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& s) {
  const int n = model.dim();
  const int d = h.dim();
  const AdaptedFrame f = adapted_frame(model, h, s);
  const Eigen::MatrixXd g = metric_at(model, f.point);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(2 * n, n);
  for (int k = 0; k < n - d; ++k) basis.col(k).head(n) = f.normal.col(k);
  for (int a = 0; a < d; ++a) basis.col(n - d + a).tail(n) = g * f.tangent.col(a);
  return basis;
}

ClosestPoint closest_point(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& x) {
  ClosestPoint cp;
  const int n = model.dim();
  switch (h.kind()) {
    case SubmanifoldKind::embedded_circle: {
      const Eigen::VectorXd o = model.nearest_image(x - h.center());
      const double rho = o.norm();
      const double s = wrap_angle(std::atan2(o(1), o(0)));
      cp.s = Eigen::VectorXd::Constant(1, s);
      const Eigen::Vector2d nrm(std::cos(s), std::sin(s));
      cp.offset = (rho - h.radius()) * nrm;
      cp.signed_distance = rho - h.radius();
      cp.distance = std::abs(cp.signed_distance);
      break;
    }
    case SubmanifoldKind::affine_subtorus: {
      const int d = h.dim();
      const Eigen::MatrixXd normal = h.subtorus_frame().rightCols(n - d);
      const Eigen::VectorXd w = x - h.anchor();
      const Eigen::VectorXd u = model.lattice_coordinates(w);
      Eigen::VectorXd base = Eigen::VectorXd::Zero(n);
      for (int i = d; i < n; ++i) base(i) = std::round(u(i));
      Eigen::VectorXd best_w = w - model.lattice().transpose() * base;
      double best = (normal.transpose() * best_w).squaredNorm();
      for_each_neighbour(n - d, [&](const Eigen::VectorXd& k) {
        Eigen::VectorXd shift = base;
        shift.tail(n - d) += k;
        const Eigen::VectorXd cand = w - model.lattice().transpose() * shift;
        const double c = (normal.transpose() * cand).squaredNorm();
        if (c < best) {
          best = c;
          best_w = cand;
        }
      });
      const Eigen::VectorXd along = h.span().colPivHouseholderQr().solve(best_w);
      cp.s = along.unaryExpr([](double t) { return wrap_angle(kTwoPi * t); });
      cp.offset = normal * (normal.transpose() * best_w);
      cp.distance = cp.offset.norm();
      cp.signed_distance = (n - d == 1) ? normal.col(0).dot(best_w) : cp.distance;
      break;
    }
    case SubmanifoldKind::point: {
      cp.s = Eigen::VectorXd(0);
      cp.offset = model.nearest_image(x - h.anchor());
      cp.distance = cp.offset.norm();
      cp.signed_distance = cp.distance;
      break;
    }
    case SubmanifoldKind::latitude_circle: {
      cp.s = Eigen::VectorXd::Constant(1, wrap_angle(x(1)));
      const double delta = x(0) - h.theta0();
      cp.offset = Eigen::Vector2d(delta, 0.0);
      cp.signed_distance = model.radius() * delta;
      cp.distance = std::abs(cp.signed_distance);
      break;
    }
  }
  return cp;
}

ConormalCoordinates locate_conormal(const ModelManifold& model, const Submanifold& h, const CotangentPoint& z) {
  const ClosestPoint cp = closest_point(model, h, z.x);
  const AdaptedFrame f = adapted_frame(model, h, cp.s);
  ConormalCoordinates c;
  c.s = cp.s;
  c.distance = cp.distance;
  // Components in the orthonormal frames: xi(e) for each frame vector e.
  c.zeta = f.normal.transpose() * z.xi;
  const double p = covector_norm(model, z);
  const Eigen::VectorXd tang = f.tangent.transpose() * z.xi;
  c.tangential = p > 0 ? tang.norm() / p : tang.norm();
  return c;
}

// ---------------------------------------------------------------------------
// Quadrature

double unit_sphere_volume(int k) {
  return 2.0 * std::pow(kPi, (k + 1) / 2.0) / std::tgamma((k + 1) / 2.0);
}

double unit_ball_volume(int k) { return std::pow(kPi, k / 2.0) / std::tgamma(k / 2.0 + 1.0); }

double snh_measure(const Submanifold& h) { return h.volume() * unit_sphere_volume(h.codim() - 1); }

namespace {

struct FiberRule {
  std::vector<Eigen::VectorXd> directions;
  std::vector<double> weights;
};

FiberRule fiber_rule(int codim, int nodes) {
  FiberRule rule;
  if (codim == 1) {
    rule.directions = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)};
    rule.weights = {1.0, 1.0};
  } else if (codim == 2) {
    if (nodes < 8) throw ConfigError("resolution below minimum (8 fiber nodes)");
    for (int j = 0; j < nodes; ++j) {
      const double a = (j + 0.5) * kTwoPi / nodes;
      rule.directions.push_back(Eigen::Vector2d(std::cos(a), std::sin(a)));
      rule.weights.push_back(kTwoPi / nodes);
    }
  } else if (codim == 3) {
    if (nodes < 8) throw ConfigError("resolution below minimum (8 fiber nodes)");
    const GaussLegendreRule gl = gauss_legendre(nodes / 2);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double ct = gl.nodes[i];
      const double st = std::sqrt(1.0 - ct * ct);
      for (int j = 0; j < nodes; ++j) {
        const double a = (j + 0.5) * kTwoPi / nodes;
        rule.directions.push_back(Eigen::Vector3d(st * std::cos(a), st * std::sin(a), ct));
        rule.weights.push_back(gl.weights[i] * kTwoPi / nodes);
      }
    }
  } else {
    throw ConfigError("normal spheres of dimension > 2 are not supported");
  }
  return rule;
}

}  // namespace

SnhQuadrature snh_quadrature(const ModelManifold& model, const Submanifold& h, const SnhResolution& resolution) {
  const int d = h.dim();
  if (d > 0 && resolution.h_nodes < 8) throw ConfigError("resolution below minimum (8 nodes per H dimension)");
  const FiberRule fiber = fiber_rule(h.codim(), resolution.fiber_nodes);

  // Midpoint-shifted periodic nodes on [0, 2*pi)^d.
  std::size_t h_count = 1;
  for (int a = 0; a < d; ++a) h_count *= static_cast<std::size_t>(resolution.h_nodes);
  const double ds = kTwoPi / resolution.h_nodes;

  SnhQuadrature q;
  q.nodes.reserve(h_count * fiber.directions.size());
  CompensatedSum total;
  for (std::size_t idx = 0; idx < h_count; ++idx) {
    Eigen::VectorXd s(d);
    std::size_t rem = idx;
    for (int a = d - 1; a >= 0; --a) {
      s(a) = (static_cast<double>(rem % resolution.h_nodes) + 0.5) * ds;
      rem /= resolution.h_nodes;
    }
    const AdaptedFrame f = adapted_frame(model, h, s);
    const double h_weight = f.area_element * std::pow(ds, d);
    for (std::size_t j = 0; j < fiber.directions.size(); ++j) {
      SnhNode node;
      node.s = s;
      node.zeta = fiber.directions[j];
      node.z = conormal_lift(model, h, s, node.zeta);
      node.weight = h_weight * fiber.weights[j];
      total.add(node.weight);
      q.nodes.push_back(std::move(node));
    }
  }
  q.total_measure = total.value();
  return q;
}

double phase_distance(const ModelManifold& model, const CotangentPoint& a, const CotangentPoint& b) {
  if (model.kind() == ModelKind::flat_torus) {
    const Eigen::VectorXd dx = model.nearest_image(b.x - a.x);
    return std::sqrt(dx.squaredNorm() + (b.xi - a.xi).squaredNorm());
  }
  const double r = model.radius();
  const auto ea = sphere::embed(a.x(0), a.x(1), a.xi(0), a.xi(1), r);
  const auto eb = sphere::embed(b.x(0), b.x(1), b.xi(0), b.xi(1), r);
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    s += (ea.X[i] - eb.X[i]) * (ea.X[i] - eb.X[i]);
    s += (ea.U[i] - eb.U[i]) * (ea.U[i] - eb.U[i]);
  }
  return std::sqrt(s);
}

}  // namespace klab
