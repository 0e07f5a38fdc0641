#include "klab/check/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <boost/math/tools/roots.hpp>

#include "klab/check/oracles.hpp"
#include "klab/counting.hpp"
#include "klab/errors.hpp"
#include "klab/experiment.hpp"
#include "klab/io.hpp"
#include "klab/loop_table.hpp"
#include "klab/returns.hpp"
#include "klab/special_functions.hpp"
#include "klab/spectrum.hpp"

namespace klab::check {
namespace {

enum class Geometry { torus_circle, torus_point, sphere_equator, other };

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Geometry classify(const ExperimentConfig& cfg) {
  const ModelManifold model = make_model(cfg.model);
  if (model.kind() == ModelKind::flat_torus && model.dim() == 2) {
    const bool standard = (model.lattice() - kTwoPi * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12;
    if (!standard) return Geometry::other;
    if (cfg.h.kind == SubmanifoldKind::embedded_circle && cfg.h.r == 1.0) return Geometry::torus_circle;
    if (cfg.h.kind == SubmanifoldKind::point) return Geometry::torus_point;
    return Geometry::other;
  }
  if (model.kind() == ModelKind::round_sphere && model.radius() == 1.0 &&
      cfg.h.kind == SubmanifoldKind::latitude_circle && std::abs(cfg.h.theta0 - 0.5 * kPi) <= 1e-12)
    return Geometry::sphere_equator;
  return Geometry::other;
}

struct Setup {
  ModelManifold model;
  Submanifold h;
  SnhQuadrature quad;
  Executor exec;
};

Setup make_setup(const ExperimentConfig& cfg) {
  ModelManifold model = make_model(cfg.model);
  Submanifold h = make_submanifold(model, cfg.h);
  SnhQuadrature quad = snh_quadrature(model, h, cfg.resolution());
  return {std::move(model), std::move(h), std::move(quad), Executor(cfg.threads)};
}

LoopTable table_with(const Setup& s, const ExperimentConfig& cfg, double t_max, FlowOptions flow, double delta) {
  LoopTableOptions opt;
  opt.t_max = t_max;
  opt.tol = cfg.tol;
  opt.delta_cluster = delta;
  opt.measure_floor = cfg.measure_floor;
  opt.flow = flow;
  return build_loop_table(s.model, s.h, s.quad, opt, s.exec);
}

/// Shortest loop length: the diameter for the torus circle, pi for the equator.
double first_loop_time(Geometry g) {
  switch (g) {
    case Geometry::torus_circle: return 2.0;
    case Geometry::sphere_equator: return kPi;
    default: return 0.0;
  }
}

CriterionResult horizon_skip(std::string id, std::string title) {
  CriterionResult r;
  r.id = std::move(id);
  r.title = std::move(title);
  r.outcome = Outcome::skipped;
  r.measured = "skipped: horizon below first return";
  return r;
}

template <class F>
CriterionResult timed(const ResultSink& sink, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.outcome = Outcome::fail;
    r.measured = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (sink) sink(r);
  return r;
}

Outcome verdict(bool ok) { return ok ? Outcome::pass : Outcome::fail; }

// ---------------------------------------------------------------------------

CriterionResult c1_figure(const ExperimentConfig& cfg) {
  CriterionResult r{"1", "torus staircase tracks 2 lambda - cos 2 lambda", {}, {}, {}, "calibration", 0.0};
  const Setup s = make_setup(cfg);
  const SpectrumTable spectrum = enumerate_spectrum(s.model, s.h, 100.0, s.exec, cfg.spectrum_cap);
  const CountingFunction ncf = staircase(spectrum);
  const std::vector<double> grid = midpoint_grid(ncf, 20.0, 100.0);
  const double C = main_constant(s.model, s.h);
  const TwoTermReport rep =
      two_term_report(ncf, C, 1, [](double x) { return -std::cos(2.0 * x); }, grid, false, s.exec);
  const WindowStats early = window_stats(rep, 20.0, 40.0);
  const WindowStats late = window_stats(rep, 80.0, 100.0);
  const WindowStats upper = window_stats(rep, 50.0, 100.0);
  r.measured = "mean|r| [80,100] = " + num(late.mean_abs) + ", [20,40] = " + num(early.mean_abs) +
               "; max|r| [50,100] = " + num(upper.max_abs);
  r.threshold = "late mean < early mean; max <= 0.5";
  r.outcome = verdict(late.mean_abs < early.mean_abs && upper.max_abs <= 0.5 && early.count > 0 && late.count > 0);
  return r;
}

struct QCheck {
  bool two_clusters = false;
  double t_defect = 0.0;
  double abs_defect = 0.0;
  double arg_defect = 0.0;
  double q_curve_defect = 0.0;
};

QCheck check_circle_table(const LoopTable& table) {
  QCheck c;
  c.two_clusters = table.clusters.size() == 2;
  if (!c.two_clusters) return c;
  const LoopCluster& neg = table.clusters[0];
  const LoopCluster& pos = table.clusters[1];
  c.t_defect = std::max(std::abs(neg.t + 2.0), std::abs(pos.t - 2.0));
  c.abs_defect = std::abs(std::abs(pos.q) - 1.0);
  c.arg_defect = std::abs(std::arg(pos.q) - 0.5 * kPi);
  for (int k = 0; k <= 400; ++k) {
    const double x = 0.25 * k;
    c.q_curve_defect = std::max(c.q_curve_defect, std::abs(eval_Q(table, x) + std::cos(2.0 * x)));
  }
  return c;
}

CriterionResult c2_loop_invariant(const ExperimentConfig& cfg) {
  const std::string title = "loop times {-2, 2}, q(2) = i, Q = -cos 2 lambda";
  if (cfg.t_max < first_loop_time(Geometry::torus_circle)) return horizon_skip("2", title);
  CriterionResult r{"2", title, {}, {}, {}, "reference", 0.0};
  const Setup s = make_setup(cfg);
  const QCheck exact = check_circle_table(table_with(s, cfg, cfg.t_max, {}, 1e-6));
  FlowOptions numeric = cfg.flow_options();
  numeric.method = FlowMethod::implicit_midpoint;
  const QCheck approx = check_circle_table(table_with(s, cfg, std::min(cfg.t_max, 3.0), numeric, 1e-4));
  auto describe = [](const QCheck& c) {
    if (!c.two_clusters) return std::string("cluster set is not {-2, 2}");
    return "t " + sci(c.t_defect) + ", |q|-1 " + sci(c.abs_defect) + ", arg-pi/2 " + sci(c.arg_defect) + ", Q " +
           sci(c.q_curve_defect);
  };
  auto ok = [](const QCheck& c, double tol) {
    return c.two_clusters && c.t_defect <= tol && c.abs_defect <= tol && c.arg_defect <= tol &&
           c.q_curve_defect <= tol;
  };
  r.measured = "closed form: " + describe(exact) + "; implicit midpoint (|t| <= 3): " + describe(approx);
  r.threshold = "1e-6 closed form, 1e-4 implicit midpoint";
  r.outcome = verdict(ok(exact, 1e-6) && ok(approx, 1e-4));
  return r;
}

CriterionResult c3_smoothed(const ExperimentConfig& cfg) {
  CriterionResult r{"3", "smoothed density N' * rho near the main constant 2", {}, {}, {}, "reference", 0.0};
  const Setup s = make_setup(cfg);
  // The kernel decays like x^-4, so the spectrum must extend well past 100.
  const SpectrumTable spectrum = enumerate_spectrum(s.model, s.h, 200.0, s.exec, cfg.spectrum_cap);
  const CountingFunction ncf = staircase(spectrum);
  const SmoothingKernel kernel(0.5);
  std::vector<double> grid;
  for (int k = 5; k <= 10; ++k) grid.push_back(10.0 * k);
  const std::vector<double> v = convolve_grid(ncf, kernel, grid, ConvolutionMode::dN, s.exec);
  double lo = v.front(), hi = v.front();
  std::string list;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    list += (list.empty() ? "" : " ") + num(x);
  }
  r.measured = "lambda = 50..100: " + list;
  r.threshold = "all in [1.98, 2.02]";
  r.outcome = verdict(lo >= 1.98 && hi <= 2.02);
  return r;
}

CriterionResult c4_point(const ExperimentConfig& cfg) {
  CriterionResult r{"4", "point Weyl count and main constant 1/(4 pi)", {}, {}, {}, "oracle", 0.0};
  const Setup s = make_setup(cfg);
  const SpectrumTable spectrum = enumerate_spectrum(s.model, s.h, 200.0, s.exec, cfg.spectrum_cap);
  const double n200 = staircase(spectrum)(200.0);
  const double ratio = n200 * 4.0 * kPi * kPi / (kPi * 200.0 * 200.0);
  const double oracle = oracle::point_counting_value(200.0);
  const double count_defect = std::abs(n200 - oracle) / oracle;
  const double C = main_constant(s.model, s.h);
  const double c_defect = std::abs(C * 4.0 * kPi - 1.0);
  r.measured = "N(200) 4pi^2/(pi 200^2) = " + num(ratio) + ", vs lattice count " + sci(count_defect) +
               ", |4 pi C - 1| = " + sci(c_defect);
  r.threshold = "ratio in [0.99, 1.01]; count 1e-12; C 4e-16";
  r.outcome = verdict(ratio >= 0.99 && ratio <= 1.01 && count_defect <= 1e-12 && c_defect <= 4e-16);
  return r;
}

CriterionResult c5_special() {
  CriterionResult r{"5", "bessel_j0 vs Simpson quadrature, first zero", {}, {}, {}, "oracle", 0.0};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = 200.0 * i / 999.0;
    worst = std::max(worst, std::abs(bessel_j0(x) - oracle::j0_simpson(x)));
  }
  boost::uintmax_t iters = 200;
  const auto bracket = boost::math::tools::toms748_solve([](double x) { return bessel_j0(x); }, 2.0, 3.0,
                                                         boost::math::tools::eps_tolerance<double>(52), iters);
  const double root = 0.5 * (bracket.first + bracket.second);
  const double oracle_root = oracle::j0_simpson_first_zero();
  const double root_defect = std::max(std::abs(root - 2.404825557695773), std::abs(oracle_root - 2.404825557695773));
  r.measured = "max diff " + sci(worst) + ", zero " + format_double(root) + " (quadrature " +
               format_double(oracle_root) + ")";
  r.threshold = "diff <= 1e-10; zero 2.404825557695773 +- 1e-9";
  r.outcome = verdict(worst <= 1e-10 && root_defect <= 1e-9);
  return r;
}

CriterionResult c6_flow(const ExperimentConfig& cfg, const std::string& id) {
  CriterionResult r{id, "energy, symplecticity, integrator vs closed form", {}, {}, {}, "reference", 0.0};
  const ModelManifold model = make_model(cfg.model);
  std::vector<CotangentPoint> starts;
  if (model.kind() == ModelKind::round_sphere) {
    const double R = model.radius();
    starts.push_back({Eigen::Vector2d(1.1, 0.4), Eigen::Vector2d(0.3, -0.8) * R});
    starts.push_back({Eigen::Vector2d(0.7, 2.0), Eigen::Vector2d(1.0, 0.5) * R});
    starts.push_back({Eigen::Vector2d(2.3, -1.0), Eigen::Vector2d(-0.4, 0.2) * R});
  } else {
    const int n = model.dim();
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXd x(n), xi(n);
      for (int i = 0; i < n; ++i) {
        x(i) = 0.3 + 0.7 * i + 1.3 * k;
        xi(i) = std::cos(0.9 * (i + 1) + 1.7 * k) * (1.0 + 0.5 * k);
      }
      starts.push_back({x, xi});
    }
  }
  const std::vector<double> times = {0.5, 1.7, 3.3, 6.1, 10.0};
  FlowOptions numeric = cfg.flow_options();
  numeric.method = FlowMethod::implicit_midpoint;
  double energy = 0.0, sympl = 0.0, sympl_exact = 0.0, dev = 0.0;
  for (const auto& z : starts) {
    const double p0 = covector_norm(model, z);
    for (double sign : {1.0, -1.0}) {
      NumericPath path(model, z, numeric, true);
      double now = 0.0;
      for (double t : times) {
        path.advance(sign * t - now);
        now = sign * t;
        const CotangentPoint zn = path.point();
        const double w = 1.0 + t;
        energy = std::max(energy, std::abs(covector_norm(model, zn) - p0) / w);
        sympl = std::max(sympl, symplectic_defect(path.tangent()) / w);
        const CotangentPoint zc = flow(model, z, now);
        sympl_exact = std::max(sympl_exact, symplectic_defect(tangent_flow(model, z, now).m) / w);
        dev = std::max(dev, phase_distance(model, zn, zc));
      }
    }
  }
  r.measured = "energy/(1+|t|) " + sci(energy) + ", symplectic/(1+|t|) " + sci(sympl) + " (closed form " +
               sci(sympl_exact) + "), deviation " + sci(dev);
  r.threshold = "1e-9, 1e-8, 1e-7 over |t| <= 10";
  r.outcome = verdict(energy <= 1e-9 && sympl <= 1e-8 && sympl_exact <= 1e-8 && dev <= 1e-7);
  return r;
}

const ReturnEvent* event_near(const DetectResult& d, double t) {
  for (const auto& e : d.events)
    if (std::abs(e.time - t) <= 1e-6) return &e;
  return nullptr;
}

CriterionResult c7_structure(const ExperimentConfig& cfg) {
  const std::string title = "conjugation q(-t) = conj q(t); chained J and sigma on the torus";
  if (cfg.t_max < first_loop_time(Geometry::torus_circle)) return horizon_skip("7", title);
  CriterionResult r{"7", title, {}, {}, {}, "reference", 0.0};
  const Setup s = make_setup(cfg);
  const double conj = pairing_defect(table_with(s, cfg, cfg.t_max, cfg.flow_options(), cfg.cluster_width()));

  // Horizontal diameter: a transversal leg of length 2, then a non-transversal
  // leg of length 2 pi - 2 back to the starting covector.
  const FlowOptions flow = cfg.flow_options();
  const Eigen::VectorXd s0 = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd inward = Eigen::VectorXd::Constant(1, -1.0);
  const CotangentPoint z = conormal_lift(s.model, s.h, s0, inward);
  const DetectResult first = detect_returns(s.model, s.h, z, 7.0, cfg.tol, flow);

  const Eigen::Vector2d x0 = z.x, u = z.xi.normalized();
  const std::vector<double> lattice_times = oracle::circle_conormal_returns(
      s.model.lattice(), s.h.center(), s.h.radius(), x0, u, 7.0, 1e-9);
  std::vector<double> found;
  for (const auto& e : first.events) found.push_back(e.time);
  std::sort(found.begin(), found.end());
  double oracle_defect = lattice_times.size() == found.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; std::isfinite(oracle_defect) && i < found.size(); ++i)
    oracle_defect = std::max(oracle_defect, std::abs(lattice_times[i] - found[i]));

  const ReturnEvent* leg1 = event_near(first, 2.0);
  if (!leg1 || !leg1->transversal || !leg1->jacobian) {
    r.measured = "no transversal return at t = 2";
    r.outcome = Outcome::fail;
    return r;
  }
  const CotangentPoint z2 = conormal_lift(s.model, s.h, leg1->arrival_s, leg1->arrival_zeta);
  const double t2 = kTwoPi - 2.0;
  const DetectResult second = detect_returns(s.model, s.h, z2, 7.0, cfg.tol, flow);
  const bool wrap_found = event_near(second, t2) != nullptr && event_near(first, kTwoPi) != nullptr;
  const double j_total = induced_jacobian(s.model, s.h, z, kTwoPi, flow);
  const double j_chain = induced_jacobian(s.model, s.h, z2, t2, flow) * *leg1->jacobian;
  const double j_defect = std::abs(j_total - j_chain) / std::abs(j_total);
  const int sigma_total = maslov_index(s.model, s.h, z, kTwoPi, flow);
  const int sigma_chain = (leg1->maslov + maslov_index(s.model, s.h, z2, t2, flow)) % 4;

  r.measured = "conjugation " + sci(conj) + "; events vs lattice " + sci(oracle_defect) + "; J_2pi " + num(j_total) +
               " vs chain " + num(j_chain) + " (rel " + sci(j_defect) + "); sigma " + std::to_string(sigma_total) +
               " vs " + std::to_string(sigma_chain);
  r.threshold = "conjugation 1e-8; J 1e-6 relative; sigma equal mod 4";
  r.outcome = verdict(conj <= 1e-8 && wrap_found && oracle_defect <= 1e-8 && j_defect <= 1e-6 &&
                      sigma_total == sigma_chain);
  return r;
}

CriterionResult c8_monotone(const ExperimentConfig& cfg) {
  const std::string title = "2 lambda + Q(lambda) nondecreasing on [0, 50]";
  if (cfg.t_max < first_loop_time(Geometry::torus_circle)) return horizon_skip("8", title);
  CriterionResult r{"8", title, {}, {}, {}, "reference", 0.0};
  const Setup s = make_setup(cfg);
  const LoopTable table = table_with(s, cfg, cfg.t_max, cfg.flow_options(), cfg.cluster_width());
  const double C = main_constant(s.model, s.h);
  const double h = 1e-3;
  const std::size_t m = 50001;
  std::vector<double> f(m);
  s.exec.for_each_index(m, [&](std::size_t k) {
    const double x = h * static_cast<double>(k);
    f[k] = C * x + eval_Q(table, x);
  });
  double slope = INFINITY;
  for (std::size_t k = 0; k + 1 < m; ++k) slope = std::min(slope, (f[k + 1] - f[k]) / h);
  r.measured = "min slope " + sci(slope) + " over " + std::to_string(table.clusters.size()) + " loop times";
  r.threshold = ">= -1e-6";
  r.outcome = verdict(slope >= -1e-6);
  return r;
}

CriterionResult c9_torus(const ExperimentConfig& cfg) {
  const std::string title = "averaging A(T) = 2/T on the torus";
  if (cfg.t_max < first_loop_time(Geometry::torus_circle)) return horizon_skip("9 torus", title);
  CriterionResult r{"9 torus", title, {}, {}, {}, "reference", 0.0};
  const Setup s = make_setup(cfg);
  const LoopTable table = table_with(s, cfg, 101.0, cfg.flow_options(), cfg.cluster_width());
  double worst = 0.0;
  std::string list;
  for (double T : {10.0, 50.0, 100.0}) {
    const double A = averaging_diagnostic(table, T);
    worst = std::max(worst, std::abs(A - 2.0 / T));
    list += (list.empty() ? "" : ", ") + ("A(" + num(T) + ") = " + num(A));
  }
  r.measured = list + "; max |A - 2/T| " + sci(worst);
  r.threshold = "1e-8";
  r.outcome = verdict(worst <= 1e-8);
  return r;
}

CriterionResult c9_sphere(const ExperimentConfig& cfg) {
  const std::string title = "averaging A(T) bounded away from 0 on the sphere";
  if (cfg.t_max < first_loop_time(Geometry::sphere_equator)) return horizon_skip("9 sphere", title);
  CriterionResult r{"9 sphere", title, {}, {}, {}, "calibration", 0.0};
  const Setup s = make_setup(cfg);
  const LoopTable table = table_with(s, cfg, 30.0 * kPi + 1.0, cfg.flow_options(), cfg.cluster_width());
  bool ok = true;
  std::string list;
  for (int k : {10, 20, 30}) {
    const double A = averaging_diagnostic(table, k * kPi);
    ok = ok && A >= 1.0 && A <= 1.6;
    list += (list.empty() ? "" : ", ") + ("A(" + std::to_string(k) + "pi) = " + num(A));
  }
  r.measured = list;
  r.threshold = "in [1.0, 1.6]";
  r.outcome = verdict(ok);
  return r;
}

CriterionResult c10_sphere(const ExperimentConfig& cfg) {
  CriterionResult r{"10 sphere", "equator jumps at even l in [20, 60] near 4", {}, {}, {}, "oracle", 0.0};
  const Setup s = make_setup(cfg);
  const double top = std::sqrt(60.0 * 61.0) + 0.5;
  const CountingFunction ncf = staircase(enumerate_spectrum(s.model, s.h, top, s.exec, cfg.spectrum_cap));
  double worst = 0.0, oracle_defect = 0.0, lo = INFINITY, hi = -INFINITY;
  for (int l = 20; l <= 60; l += 2) {
    const double x = std::sqrt(l * (l + 1.0));
    const double jump = ncf(x) - ncf(x - 1e-6);
    lo = std::min(lo, jump);
    hi = std::max(hi, jump);
    worst = std::max(worst, std::abs(jump / 4.0 - 1.0));
    const double expect = oracle::sphere_equator_jump(l);
    oracle_defect = std::max(oracle_defect, std::abs(jump - expect) / expect);
  }
  r.measured = "jumps in [" + num(lo) + ", " + num(hi) + "], max |jump/4 - 1| " + sci(worst) +
               ", vs central binomial " + sci(oracle_defect);
  r.threshold = "within 10% of 4; oracle 1e-10 relative";
  r.outcome = verdict(worst <= 0.1 && oracle_defect <= 1e-10);
  return r;
}

CriterionResult c10_torus(const ExperimentConfig& cfg) {
  CriterionResult r{"10 torus", "quasimode windows N(lambda + 0.2) - N(lambda) on [50, 100]", {}, {}, {},
                    "calibration", 0.0};
  const Setup s = make_setup(cfg);
  const CountingFunction ncf = staircase(enumerate_spectrum(s.model, s.h, 101.0, s.exec, cfg.spectrum_cap));
  double worst = 0.0, at = 0.0;
  for (int k = 0; k <= 5000; ++k) {
    const double x = 50.0 + 0.01 * k;
    const double w = quasimode_jump(ncf, x, 0.2);
    if (w > worst) {
      worst = w;
      at = x;
    }
  }
  r.measured = "max " + num(worst) + " at lambda = " + num(at) + " (grid step 0.01)";
  r.threshold = "<= 0.6";
  r.outcome = verdict(worst <= 0.6);
  return r;
}

CriterionResult c11(const ExperimentConfig& cfg, bool sphere) {
  CriterionResult r{sphere ? "11 sphere" : "11 torus", sphere ? "<U^k 1, 1> stays at |SN*H|" : "running average of <U^k 1, 1> decays",
                    {}, {}, {}, sphere ? "reference" : "calibration", 0.0};
  const Setup s = make_setup(cfg);
  const double mass = snh_measure(s.h);
  if (sphere) {
    const ErgodicAverages e = ergodic_average(s.model, s.h, s.quad, 5, 4.0, cfg.tol, cfg.flow_options(), s.exec);
    double worst = 0.0;
    for (double p : e.pairings) worst = std::max(worst, std::abs(p / mass - 1.0));
    r.measured = "max |<U^k 1,1>/|SN*H| - 1| over k <= 5: " + sci(worst);
    r.threshold = "<= 0.01";
    r.outcome = verdict(e.pairings.size() == 5 && worst <= 0.01);
  } else {
    const ErgodicAverages e = ergodic_average(s.model, s.h, s.quad, 10, 20.0, cfg.tol, cfg.flow_options(), s.exec);
    const double avg = e.running_average.empty() ? INFINITY : e.running_average.back();
    r.measured = "running average at k = 10: " + num(avg) + " = " + num(avg / mass) + " |SN*H|";
    r.threshold = "<= 1e-3 |SN*H|";
    r.outcome = verdict(avg <= 1e-3 * mass);
  }
  return r;
}

CriterionResult c12(const ExperimentConfig& cfg, bool sphere) {
  CriterionResult r{sphere ? "12 sphere" : "12 torus", "recurrence fraction at delta = 0.1", {}, {}, {}, "calibration",
                    0.0};
  const Setup s = make_setup(cfg);
  const double t_max = sphere ? 7.0 : 20.0;
  const double f = recurrence_fraction(s.model, s.h, s.quad, 0.1, t_max, cfg.tol, cfg.flow_options(), s.exec);
  r.measured = "fraction " + num(f) + " (t_max " + num(t_max) + ")";
  r.threshold = sphere ? ">= 0.98" : "<= 0.02";
  r.outcome = verdict(sphere ? f >= 0.98 : f <= 0.02);
  return r;
}

CriterionResult c13(const ExperimentConfig& cfg, bool sphere) {
  CriterionResult r{sphere ? "13 sphere" : "13 torus",
                    sphere ? "sigma at k pi equals k mod 4" : "sigma at t = 2 equals 1", {}, {}, {}, "oracle", 0.0};
  const Setup s = make_setup(cfg);
  const FlowOptions flow = cfg.flow_options();
  int checked = 0, mismatched = 0;
  bool lock = true;
  for (std::size_t i = 0; i < s.quad.nodes.size(); i += 16) {
    const SnhNode& node = s.quad.nodes[i];
    const double zeta = node.zeta(0);
    if (sphere) {
      for (int k = 1; k <= 4; ++k) {
        const double t = k * kPi;
        const int sigma = maslov_index(s.model, s.h, node.z, t, flow);
        const int expect = ((oracle::sphere_latitude_focal_count(s.h.theta0(), zeta, t) % 4) + 4) % 4;
        ++checked;
        if (sigma != expect) ++mismatched;
        if (sigma != k % 4) lock = false;
      }
    } else {
      for (double t : {2.0, -2.0}) {
        const int sigma = maslov_index(s.model, s.h, node.z, t, flow);
        const int expect = ((oracle::flat_circle_focal_count(s.h.radius(), zeta, t) % 4) + 4) % 4;
        ++checked;
        if (sigma != expect) ++mismatched;
        if (t > 0.0 && zeta < 0.0 && sigma != 1) lock = false;
      }
    }
  }
  r.measured = std::to_string(checked) + " (node, t) pairs, " + std::to_string(mismatched) +
               " disagree with Jacobi-field count";
  r.threshold = sphere ? "all agree; sigma_{k pi} = k mod 4" : "all agree; sigma_2 = 1 inward";
  r.outcome = verdict(checked > 0 && mismatched == 0 && lock);
  return r;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CriterionResult c14_determinism(const ExperimentConfig& cfg, const std::string& id) {
  CriterionResult r{id, "report outputs identical at 1 and 8 threads", {}, {}, {}, "reference", 0.0};
  const auto base = std::filesystem::temp_directory_path() /
                    ("klab-determinism-" + hex64(config_hash(cfg)) + "-" + std::to_string(::getpid()));
  std::vector<std::string> names;
  for (int threads : {1, 8}) {
    ExperimentConfig c = cfg;
    c.threads = threads;
    c.out = (base / std::to_string(threads)).string();
    const RunSummary summary = cmd_report(c);
    if (names.empty())
      for (const auto& f : summary.files) names.push_back(std::filesystem::path(f).filename().string());
  }
  std::size_t same = 0;
  for (const auto& n : names)
    if (read_file(base / "1" / n) == read_file(base / "8" / n)) ++same;
  std::filesystem::remove_all(base);
  r.measured = std::to_string(same) + "/" + std::to_string(names.size()) + " files identical";
  r.threshold = "all identical";
  r.outcome = verdict(!names.empty() && same == names.size());
  return r;
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  const char* tag = r.outcome == Outcome::pass ? "PASS" : r.outcome == Outcome::fail ? "FAIL" : "SKIP";
  char head[64];
  std::snprintf(head, sizeof head, "%s  %-10s", tag, r.id.c_str());
  std::string line = std::string(head) + r.title + " | " + r.measured;
  if (r.outcome != Outcome::skipped) {
    line += " | threshold: " + r.threshold + " | basis: " + r.basis;
    char t[32];
    std::snprintf(t, sizeof t, " | %.2f s", r.seconds);
    line += t;
  }
  return line;
}

ExperimentConfig torus_circle_config() { return ExperimentConfig{}; }

ExperimentConfig torus_point_config() {
  ExperimentConfig cfg;
  cfg.h = SubmanifoldDescriptor{};
  cfg.h.kind = SubmanifoldKind::point;
  cfg.h.anchor = {0.7, 1.9};
  return cfg;
}

ExperimentConfig sphere_equator_config() {
  ExperimentConfig cfg;
  cfg.model = ModelDescriptor{};
  cfg.model.kind = ModelKind::round_sphere;
  cfg.h = SubmanifoldDescriptor{};
  cfg.h.kind = SubmanifoldKind::latitude_circle;
  cfg.h.theta0 = 0.5 * kPi;
  return cfg;
}

std::vector<CriterionResult> run_verify(const ExperimentConfig& cfg, const ResultSink& sink) {
  validate_config(cfg);
  const Geometry g = classify(cfg);
  std::vector<CriterionResult> out;
  auto add = [&](auto&& body) { out.push_back(timed(sink, body)); };
  const bool sphere = make_model(cfg.model).kind() == ModelKind::round_sphere;
  if (g == Geometry::torus_circle) {
    add([&] { return c1_figure(cfg); });
    add([&] { return c2_loop_invariant(cfg); });
    add([&] { return c3_smoothed(cfg); });
  }
  if (g == Geometry::torus_point) add([&] { return c4_point(cfg); });
  add([&] { return c5_special(); });
  add([&] { return c6_flow(cfg, sphere ? "6 sphere" : "6 torus"); });
  if (g == Geometry::torus_circle) {
    add([&] { return c7_structure(cfg); });
    add([&] { return c8_monotone(cfg); });
    add([&] { return c9_torus(cfg); });
    add([&] { return c10_torus(cfg); });
    add([&] { return c11(cfg, false); });
    add([&] { return c12(cfg, false); });
    add([&] { return c13(cfg, false); });
  }
  if (g == Geometry::sphere_equator) {
    add([&] { return c9_sphere(cfg); });
    add([&] { return c10_sphere(cfg); });
    add([&] { return c11(cfg, true); });
    add([&] { return c12(cfg, true); });
    add([&] { return c13(cfg, true); });
  }
  add([&] { return c14_determinism(cfg, sphere ? "14 sphere" : "14 torus"); });
  return out;
}

std::vector<CriterionResult> run_suite(int threads, const ResultSink& sink) {
  ExperimentConfig torus = torus_circle_config();
  ExperimentConfig point = torus_point_config();
  ExperimentConfig sphere = sphere_equator_config();
  for (ExperimentConfig* c : {&torus, &point, &sphere}) c->threads = threads;
  std::vector<CriterionResult> out;
  auto add = [&](auto&& body) { out.push_back(timed(sink, body)); };
  add([&] { return c1_figure(torus); });
  add([&] { return c2_loop_invariant(torus); });
  add([&] { return c3_smoothed(torus); });
  add([&] { return c4_point(point); });
  add([&] { return c5_special(); });
  add([&] { return c6_flow(torus, "6 torus"); });
  add([&] { return c6_flow(sphere, "6 sphere"); });
  add([&] { return c7_structure(torus); });
  add([&] { return c8_monotone(torus); });
  add([&] { return c9_torus(torus); });
  add([&] { return c9_sphere(sphere); });
  add([&] { return c10_sphere(sphere); });
  add([&] { return c10_torus(torus); });
  add([&] { return c11(torus, false); });
  add([&] { return c11(sphere, true); });
  add([&] { return c12(torus, false); });
  add([&] { return c12(sphere, true); });
  add([&] { return c13(torus, false); });
  add([&] { return c13(sphere, true); });
  add([&] { return c14_determinism(torus, "14 torus"); });
  add([&] { return c14_determinism(sphere, "14 sphere"); });
  return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (r.outcome == Outcome::fail) return false;
  return true;
}

}  // namespace klab::check
