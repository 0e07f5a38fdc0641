#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "klab/flow.hpp"
#include "klab/geometry.hpp"
#include "klab/numeric.hpp"

namespace klab {

struct LoopCluster {
  double t = 0.0;
  std::complex<double> q;
  double support_measure = 0.0;
  std::size_t node_count = 0;
};

/// The loop times found up to t_max with their invariants q(t).
struct LoopTable {
  ModelDescriptor model;
  SubmanifoldDescriptor h;
  double t_max = 0.0;
  double total_measure = 0.0;
  std::vector<LoopCluster> clusters;  // ascending t
  std::size_t warning_count = 0;
  std::vector<std::string> warnings;  // first few, prefixed by node index
  std::uint64_t descriptor_hash = 0;
};

struct LoopTableOptions {
  double t_max = 8.0 * kPi;
  double tol = 1e-10;
  /// Single-linkage width for event times.
  double delta_cluster = 1e-6;
  /// Clusters carrying less than this fraction of |SN*H| are dropped.
  double measure_floor = 0.02;
  FlowOptions flow;
};

/// Runs return detection from every quadrature node (in parallel), clusters the
/// transversal events by time and sums weight * i^sigma * sqrt(J) in ascending
/// node order. Throws NumericalError when two clusters are closer than
/// 2 * delta_cluster.
LoopTable build_loop_table(const ModelManifold& model, const Submanifold& h, const SnhQuadrature& quad,
                           const LoopTableOptions& options, const Executor& exec = Executor{});

/// Q(lambda) = sum over t > 0 of 2 Re[e^{-i t lambda} q(t) / (-i t)], ascending t.
double eval_Q(const LoopTable& table, double lambda);

/// A(T) = (1/T) sum_{|t| <= T} |q(t)|. Throws ConfigError for T > t_max.
double averaging_diagnostic(const LoopTable& table, double T);

/// max |q(-t) - conj q(t)| over cluster pairs; +inf when a cluster has no partner.
double pairing_defect(const LoopTable& table);

struct ErgodicAverages {
  std::vector<double> pairings;         // <U^k 1, 1>, k = 1..K
  std::vector<double> running_average;  // (1/k) sum_{j <= k} pairings
  double mass_deficit = 0.0;            // weight of dropped chains
  std::vector<std::string> warnings;
};

/// Iterates the first-return operator U f = (f o G^T) sqrt(J_T) on f = 1 along
/// exact return chains from each quadrature node.
ErgodicAverages ergodic_average(const ModelManifold& model, const Submanifold& h, const SnhQuadrature& quad, int K,
                                double t_max, double tol = 1e-10, const FlowOptions& flow_options = {},
                                const Executor& exec = Executor{});

/// Fraction of quadrature mass whose orbit comes back within delta (in SN*H)
/// of its start at some conormal return with 0 < |t| < t_max.
double recurrence_fraction(const ModelManifold& model, const Submanifold& h, const SnhQuadrature& quad, double delta,
                           double t_max, double tol = 1e-10, const FlowOptions& flow_options = {},
                           const Executor& exec = Executor{});

nlohmann::json to_json(const LoopTable& table);
LoopTable loop_table_from_json(const nlohmann::json& j);

}  // namespace klab
