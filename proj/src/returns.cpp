#include "klab/returns.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <unsupported/Eigen/AutoDiff>

#include "klab/errors.hpp"
#include "klab/numeric.hpp"
#include "klab/sphere_chart.hpp"

namespace klab {
namespace {

constexpr double kLipschitzMargin = 1e-6;
constexpr double kEndpointGuard = 1e-9;
constexpr double kTransversalTol = 1e-6;
constexpr double kGrazingLevel = 1e-6;

std::string format_time(double t) {
  std::ostringstream os;
  os.precision(12);
  os << t;
  return os.str();
}

template <class F>
double polish_root(F&& f, double a, double b, double fa, double fb) {
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  std::uintmax_t iterations = 200;
  const auto tol = [](double lo, double hi) {
    return std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo));
  };
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iterations);
  return 0.5 * (r.first + r.second);
}

bool opposite(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

/// Tangent vectors of the unit conormal family: d tangential directions and the
/// n-d-1 directions of the normal sphere orthogonal to zeta.
Eigen::MatrixXd unit_family(const ModelManifold& model, const Submanifold& h, const Eigen::VectorXd& s,
                            const Eigen::VectorXd& zeta) {
  const int n = model.dim();
  const int d = h.dim();
  const int c = n - d;
  const Eigen::MatrixXd basis = conormal_tangent_basis(model, h, s, zeta);
  Eigen::MatrixXd y(2 * n, n - 1);
  y.leftCols(d) = basis.leftCols(d);
  if (c > 1) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(zeta);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(c, c);
    y.rightCols(c - 1) = basis.rightCols(c) * q.rightCols(c - 1);
  }
  return y;
}

using AD4 = Eigen::AutoDiffScalar<Eigen::Vector4d>;

/// Geodesic through one start covector, sampled at multiples of dt in one time
/// direction. Numeric paths keep a checkpoint per sample so that probes between
/// samples integrate at most one sample step.
class Track {
 public:
  Track(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start, const FlowOptions& options,
        double dir, double dt)
      : model_(model), start_(start), options_(options), dir_(dir), dt_(dt) {
    const ConormalCoordinates c = locate_conormal(model, h, start);
    family_ = unit_family(model, h, c.s, c.zeta);
    if (numeric()) {
      checkpoints_.emplace_back(model, start, options, true);
    } else if (model.kind() == ModelKind::round_sphere) {
      setup_embedded();
    }
  }

  double time(std::size_t k) const { return dir_ * dt_ * static_cast<double>(k); }

  CotangentPoint point(std::size_t base, double t) {
    if (!numeric()) return flow(model_, start_, t, options_);
    return probe(base, t).point();
  }

  Eigen::MatrixXd tangent(std::size_t base, double t) {
    if (!numeric()) return tangent_flow(model_, start_, t, options_).m;
    return probe(base, t).tangent();
  }

  /// Columns: Jacobi fields of the unit conormal family and the velocity (plus
  /// the sphere normal when evaluated in R^3). Its determinant vanishes exactly
  /// at focal points.
  Eigen::MatrixXd focal_matrix(std::size_t base, double t) {
    const int n = model_.dim();
    if (numeric()) {
      const NumericPath path = probe(base, t);
      Eigen::MatrixXd m(n, n);
      m.leftCols(n - 1) = (path.chart_tangent() * family_).topRows(n);
      m.col(n - 1) = path.chart_velocity();
      return m;
    }
    if (model_.kind() == ModelKind::flat_torus) {
      Eigen::MatrixXd m(n, n);
      m.leftCols(n - 1) = (tangent_flow(model_, start_, t, options_).m * family_).topRows(n);
      m.col(n - 1) = start_.xi / start_.xi.norm();
      return m;
    }
    const double r = model_.radius();
    const double c = std::cos(t / r), s = std::sin(t / r);
    Eigen::Matrix3d m;
    m.col(0) = c * dx0_ + (r * s) * dw0_;
    m.col(1) = (-s / r) * x0_ + c * w0_;
    m.col(2) = (c * x0_ + (r * s) * w0_) / r;
    return m;
  }

 private:
  bool numeric() const { return options_.method == FlowMethod::implicit_midpoint; }

  const NumericPath& checkpoint(std::size_t k) {
    while (checkpoints_.size() <= k) {
      NumericPath next = checkpoints_.back();
      next.advance(time(checkpoints_.size()) - next.time());
      checkpoints_.push_back(next);
    }
    return checkpoints_[k];
  }

  NumericPath probe(std::size_t base, double t) {
    NumericPath path = checkpoint(base);
    path.advance(t - path.time());
    return path;
  }

  void setup_embedded() {
    const double r = model_.radius();
    std::array<AD4, 4> z;
    const Eigen::Vector4d v(start_.x(0), start_.x(1), start_.xi(0), start_.xi(1));
    for (int i = 0; i < 4; ++i) z[i] = AD4(v(i), 4, i);
    const auto e = sphere::embed(z[0], z[1], z[2], z[3], r);
    const AD4 p = sqrt(e.U[0] * e.U[0] + e.U[1] * e.U[1] + e.U[2] * e.U[2]);
    Eigen::Matrix<double, 3, 4> jx, jw;
    for (int i = 0; i < 3; ++i) {
      const AD4 w = e.U[i] / p;
      x0_(i) = e.X[i].value();
      w0_(i) = w.value();
      jx.row(i) = e.X[i].derivatives().transpose();
      jw.row(i) = w.derivatives().transpose();
    }
    dx0_ = jx * family_.col(0);
    dw0_ = jw * family_.col(0);
  }

  const ModelManifold& model_;
  CotangentPoint start_;
  FlowOptions options_;
  double dir_;
  double dt_;
  Eigen::MatrixXd family_;
  std::vector<NumericPath> checkpoints_;
  Eigen::Vector3d x0_, w0_, dx0_, dw0_;
};

/// Incremental zero finder for the focal determinant along a Track.
class FocalScan {
 public:
  explicit FocalScan(Track& track) : track_(track) {}

  /// Processes samples up to and including k.
  void advance_to(std::size_t k) {
    while (next_ <= k) {
      const Eigen::MatrixXd m = track_.focal_matrix(next_, track_.time(next_));
      const double d = m.determinant();
      double scale = 1.0;
      for (int j = 0; j < m.cols(); ++j) scale *= std::max(1.0, m.col(j).norm());
      if (next_ == 0) {
        // A family degenerate at the start (point H) has D(0) = 0; that zero
        // is not a focal point.
        prev_ = std::abs(d) <= 1e-12 * scale ? 0.0 : d;
      } else {
        process(next_ - 1, prev_, d);
        prev_ = d;
      }
      ++next_;
    }
  }

  const std::vector<double>& roots() const { return roots_; }

 private:
  void process(std::size_t base, double da, double db) {
    const double ta = track_.time(base);
    const double tb = track_.time(base + 1);
    double root;
    if (db == 0.0 && da != 0.0) {
      root = tb;
    } else if (opposite(da, db)) {
      root = polish_root([&](double t) { return track_.focal_matrix(base, t).determinant(); }, ta, tb, da, db);
    } else {
      return;
    }
    const Eigen::MatrixXd m = track_.focal_matrix(base, root);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    int nullity = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) <= 1e-6 * sv(0)) ++nullity;
    }
    for (int i = 0; i < std::max(1, nullity); ++i) roots_.push_back(root);
  }

  Track& track_;
  std::size_t next_ = 0;
  double prev_ = 0.0;
  std::vector<double> roots_;
};

struct Decomposition {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  double w_norm = 0.0;
  double area_ratio = 1.0;
};

Decomposition decompose(const ModelManifold& model, const Submanifold& h, const ConormalCoordinates& in,
                        const ConormalCoordinates& out, const Eigen::MatrixXd& m) {
  const int n = model.dim();
  const Eigen::MatrixXd w = m * conormal_tangent_basis(model, h, in.s, in.zeta);
  Eigen::MatrixXd basis(2 * n, 2 * n);
  basis << conormal_tangent_basis(model, h, out.s, out.zeta), off_conormal_basis(model, h, out.s);
  const Eigen::MatrixXd coeff = basis.fullPivLu().solve(w);
  Decomposition dec;
  dec.a = coeff.topRows(n);
  dec.b = coeff.bottomRows(n);
  dec.w_norm = w.norm();
  dec.area_ratio = adapted_frame(model, h, out.s).area_element / adapted_frame(model, h, in.s).area_element;
  return dec;
}

int reduce_mod4(int k) { return ((k % 4) + 4) % 4; }

struct ScanSettings {
  double t_max = 0.0;
  double tol = 1e-10;
  bool stop_at_first_transversal = false;
};

void validate(double t_max, double tol) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be positive");
  if (!(tol >= 1e-12 && tol <= 1e-6)) throw ConfigError("return tolerance must lie in [1e-12, 1e-6]");
}

void scan_direction(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start, double dir,
                    const ScanSettings& cfg, const FlowOptions& options, DetectResult& out) {
  const double dt = scan_step(h);
  const auto samples = static_cast<std::size_t>(std::floor(cfg.t_max / dt)) + 1;
  const bool codim_one = h.codim() == 1;
  const ConormalCoordinates c0 = locate_conormal(model, h, start);

  Track track(model, h, start, options, dir, dt);
  FocalScan focal(track);

  // codim 1: signed distance; otherwise the approach rate dir <offset, xi>/p
  // along the scan, whose - to + sign changes are the distance minima.
  const auto level = [&](std::size_t base, double t) {
    const CotangentPoint z = track.point(base, t);
    const ClosestPoint cp = closest_point(model, h, z.x);
    if (codim_one) return cp.signed_distance;
    return dir * cp.offset.dot(z.xi) / covector_norm(model, z);
  };

  std::vector<double> f(samples + 1);
  f[0] = level(0, 0.0);
  for (std::size_t k = 1; k <= samples; ++k) {
    const double ta = track.time(k - 1);
    const double tb = track.time(k);
    f[k] = level(k, tb);

    // Tangential contacts with H that do not cross it.
    if (codim_one && k >= 3) {
      const double fm = f[k - 1];
      if (std::abs(fm) < dt && std::abs(fm) <= std::abs(f[k - 2]) && std::abs(fm) <= std::abs(f[k]) &&
          !opposite(f[k - 2], fm) && !opposite(fm, f[k]) && fm != 0.0) {
        const double lo = std::min(track.time(k - 2), tb), hi = std::max(track.time(k - 2), tb);
        const auto best = boost::math::tools::brent_find_minima(
            [&](double t) { return std::abs(level(std::abs(t) < std::abs(track.time(k - 1)) ? k - 2 : k - 1, t)); },
            lo, hi, 40);
        if (best.second <= kGrazingLevel)
          out.warnings.push_back("grazing contact near t=" + format_time(best.first));
      }
    }

    if (k == 1) continue;  // the start itself lies on H
    const double fa = f[k - 1], fb = f[k];
    bool bracket;
    if (codim_one) {
      bracket = opposite(fa, fb) || (fb == 0.0 && fa != 0.0);
    } else {
      bracket = fa < 0.0 && fb >= 0.0;
    }
    if (!bracket) continue;
    // Both level functions are 1-Lipschitz in t; larger steps are image switches.
    if (std::abs(fa) + std::abs(fb) > dt * (1.0 + kLipschitzMargin) + 1e-12) continue;

    const double root = polish_root([&](double t) { return level(k - 1, t); }, ta, tb, fa, fb);
    if (std::abs(root) >= cfg.t_max - kEndpointGuard) continue;
    const CotangentPoint z = track.point(k - 1, root);
    const ConormalCoordinates loc = locate_conormal(model, h, z);
    if (loc.distance > cfg.tol) {
      if (codim_one) out.warnings.push_back("root polishing did not reach H at t=" + format_time(root));
      continue;
    }
    if (loc.tangential > cfg.tol) continue;

    ReturnEvent ev;
    ev.start = start;
    ev.time = root;
    ev.arrival = z;
    ev.arrival_s = loc.s;
    ev.arrival_zeta = loc.zeta;
    ev.distance_defect = loc.distance;
    ev.conormal_defect = loc.tangential;

    const Decomposition dec = decompose(model, h, c0, loc, track.tangent(k - 1, root));
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd_b(dec.b);
    ev.off_block = svd_b.singularValues()(0) / (1.0 + dec.w_norm);
    const double det_a = std::abs(dec.a.determinant());
    ev.transversal = ev.off_block <= kTransversalTol && det_a > 1e-12;
    if (ev.transversal) ev.jacobian = det_a * dec.area_ratio;

    focal.advance_to(k);
    int count = 0;
    bool degenerate = false;
    for (double tau : focal.roots()) {
      if (std::abs(tau - root) <= kEndpointGuard) degenerate = true;
      if (std::abs(tau) < std::abs(root) - kEndpointGuard) ++count;
    }
    if (degenerate) {
      if (ev.transversal) throw NumericalError("focal point at return time t=" + format_time(root));
      out.warnings.push_back("focal point at non-transversal return t=" + format_time(root));
    }
    ev.maslov = reduce_mod4(dir > 0 ? count : -count);
    out.events.push_back(std::move(ev));
    if (cfg.stop_at_first_transversal && out.events.back().transversal) return;
  }
}

std::vector<double> focal_roots(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start,
                                double t, const FlowOptions& options) {
  if (t == 0.0) return {};
  const double dt = scan_step(h);
  const double dir = t > 0 ? 1.0 : -1.0;
  Track track(model, h, start, options, dir, dt);
  FocalScan focal(track);
  focal.advance_to(static_cast<std::size_t>(std::floor(std::abs(t) / dt)) + 1);
  return focal.roots();
}

}  // namespace

double scan_step(const Submanifold& h) { return std::min(0.05, h.injectivity_scale() / 10.0); }

DetectResult detect_returns(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start,
                            double t_max, double tol, const FlowOptions& flow_options) {
  validate(t_max, tol);
  ScanSettings cfg;
  cfg.t_max = t_max;
  cfg.tol = tol;
  DetectResult backward, forward;
  scan_direction(model, h, start, -1.0, cfg, flow_options, backward);
  scan_direction(model, h, start, 1.0, cfg, flow_options, forward);
  DetectResult out;
  out.events = std::move(backward.events);
  for (auto& e : forward.events) out.events.push_back(std::move(e));
  out.warnings = std::move(backward.warnings);
  for (auto& w : forward.warnings) out.warnings.push_back(std::move(w));
  return out;
}

double induced_jacobian(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start, double t,
                        const FlowOptions& flow_options) {
  const CotangentPoint arrival = flow(model, start, t, flow_options);
  const Decomposition dec = decompose(model, h, locate_conormal(model, h, start),
                                      locate_conormal(model, h, arrival),
                                      tangent_flow(model, start, t, flow_options).m);
  return std::abs(dec.a.determinant()) * dec.area_ratio;
}

double jacobian_J(const ModelManifold& model, const Submanifold& h, const ReturnEvent& event,
                  const FlowOptions& flow_options) {
  if (!event.transversal) throw ConfigError("jacobian_J: event is not transversal");
  return induced_jacobian(model, h, event.start, event.time, flow_options);
}

std::vector<double> focal_times(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start,
                                double t, const FlowOptions& flow_options) {
  std::vector<double> inside;
  for (double tau : focal_roots(model, h, start, t, flow_options)) {
    if (std::abs(tau) < std::abs(t)) inside.push_back(tau);
  }
  return inside;
}

int maslov_index(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start, double t,
                 const FlowOptions& flow_options) {
  int count = 0;
  for (double tau : focal_roots(model, h, start, t, flow_options)) {
    if (std::abs(tau - t) <= kEndpointGuard) throw NumericalError("focal point at return time t=" + format_time(t));
    if (std::abs(tau) < std::abs(t)) ++count;
  }
  return reduce_mod4(t > 0 ? count : -count);
}

FirstReturn first_return(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start, double t_max,
                         double tol, const FlowOptions& flow_options) {
  validate(t_max, tol);
  ScanSettings cfg;
  cfg.t_max = t_max;
  cfg.tol = tol;
  cfg.stop_at_first_transversal = true;
  DetectResult scan;
  scan_direction(model, h, start, 1.0, cfg, flow_options, scan);
  FirstReturn fr;
  fr.horizon = t_max;
  fr.warnings = std::move(scan.warnings);
  for (auto& e : scan.events) {
    if (e.transversal) {
      fr.time = e.time;
      fr.event = std::move(e);
      break;
    }
  }
  return fr;
}

}  // namespace klab
