#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "klab/flow.hpp"
#include "klab/geometry.hpp"

namespace klab {

/// One conormal return G^t(start) in N*H.
struct ReturnEvent {
  CotangentPoint start;
  double time = 0.0;
  CotangentPoint arrival;
  /// Conormal coordinates of the arrival.
  Eigen::VectorXd arrival_s;
  Eigen::VectorXd arrival_zeta;
  /// dG^t maps T(N*H) at the start into T(N*H) at the arrival.
  bool transversal = false;
  std::optional<double> jacobian;
  /// Signed focal count reduced to 0..3.
  int maslov = 0;
  double distance_defect = 0.0;
  double conormal_defect = 0.0;
  /// Largest singular value of the off-N*H block, relative to 1 + |dG^t V|.
  double off_block = 0.0;
};

struct DetectResult {
  std::vector<ReturnEvent> events;  // negative times first (descending), then positive (ascending)
  std::vector<std::string> warnings;
};

/// Scans (-t_max, t_max) \ {0} for conormal returns of the geodesic through start.
///
/// The distance to H (codim 1: signed distance; higher codimension: the rate
/// d/dt |offset|^2 / 2) is sampled at step min(0.05, injectivity / 10), sign
/// changes are bracketed and polished with TOMS748. tol in [1e-12, 1e-6] bounds
/// both the distance to H and the tangential part of the arrival covector.
DetectResult detect_returns(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start,
                            double t_max, double tol = 1e-10, const FlowOptions& flow_options = {});

/// Density Jacobian of a transversal event. Throws ConfigError when the event
/// is not transversal.
double jacobian_J(const ModelManifold& model, const Submanifold& h, const ReturnEvent& event,
                  const FlowOptions& flow_options = {});

/// |det A| area(arrival) / area(start), where dG^t V_in = V_out A + C B in the
/// basis [T(N*H) | off-N*H]. Coincides with jacobian_J on transversal events and
/// is the block that composes along chains whose first leg is transversal.
double induced_jacobian(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start, double t,
                        const FlowOptions& flow_options = {});

/// Zeros, repeated by multiplicity, of the focal determinant of the unit conormal
/// family along the geodesic, strictly between 0 and t.
std::vector<double> focal_times(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start,
                                double t, const FlowOptions& flow_options = {});

/// Focal count on (0, t) for t > 0, minus the count on (t, 0) for t < 0, mod 4.
/// Throws NumericalError when a focal point lies within 1e-9 of t.
int maslov_index(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start, double t,
                 const FlowOptions& flow_options = {});

struct FirstReturn {
  /// +infinity when no transversal return occurs before the horizon.
  double time = std::numeric_limits<double>::infinity();
  double horizon = 0.0;
  std::optional<ReturnEvent> event;
  std::vector<std::string> warnings;

  bool finite() const { return event.has_value(); }
};

FirstReturn first_return(const ModelManifold& model, const Submanifold& h, const CotangentPoint& start, double t_max,
                         double tol = 1e-10, const FlowOptions& flow_options = {});

/// Sample step used by the return and focal scans.
double scan_step(const Submanifold& h);

}  // namespace klab
