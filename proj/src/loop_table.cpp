#include "klab/loop_table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "klab/config.hpp"
#include "klab/errors.hpp"
#include "klab/io.hpp"
#include "klab/returns.hpp"

namespace klab {
namespace {

constexpr std::size_t kKeptWarnings = 20;

std::complex<double> i_power(int sigma) {
  switch (((sigma % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

struct NodeEvent {
  double t;
  std::size_t node;
  std::complex<double> contribution;  // weight * i^sigma * sqrt(J)
  double weight;
};

struct NodeResult {
  std::vector<NodeEvent> events;
  std::vector<std::string> warnings;
};

void keep_warning(std::vector<std::string>& kept, std::size_t& count, std::size_t node, const std::string& w) {
  ++count;
  if (kept.size() < kKeptWarnings) kept.push_back("node " + std::to_string(node) + ": " + w);
}

CotangentPoint unit_relift(const ModelManifold& model, const Submanifold& h, const ReturnEvent& e) {
  return conormal_lift(model, h, e.arrival_s, e.arrival_zeta / e.arrival_zeta.norm());
}

}  // namespace

LoopTable build_loop_table(const ModelManifold& model, const Submanifold& h, const SnhQuadrature& quad,
                           const LoopTableOptions& options, const Executor& exec) {
  if (!(options.delta_cluster >= 1e-8 && options.delta_cluster <= 1e-2))
    throw ConfigError("delta_cluster must lie in [1e-8, 1e-2]");
  if (!(options.measure_floor >= 0.0)) throw ConfigError("measure_floor must be >= 0");

  const std::size_t count = quad.nodes.size();
  std::vector<NodeResult> per_node(count);
  exec.for_each_index(count, [&](std::size_t i) {
    const SnhNode& node = quad.nodes[i];
    DetectResult r = detect_returns(model, h, node.z, options.t_max, options.tol, options.flow);
    NodeResult& out = per_node[i];
    for (const ReturnEvent& e : r.events) {
      if (!e.transversal) continue;
      out.events.push_back({e.time, i, node.weight * i_power(e.maslov) * std::sqrt(*e.jacobian), node.weight});
    }
    out.warnings = std::move(r.warnings);
  });

  LoopTable table;
  table.model = model.descriptor();
  table.h = h.descriptor();
  table.t_max = options.t_max;
  table.total_measure = quad.total_measure;
  table.descriptor_hash = fnv1a64(to_json(table.model).dump() + to_json(table.h).dump());

  std::vector<NodeEvent> all;
  for (std::size_t i = 0; i < count; ++i) {
    for (const auto& w : per_node[i].warnings) keep_warning(table.warnings, table.warning_count, i, w);
    all.insert(all.end(), per_node[i].events.begin(), per_node[i].events.end());
  }
  std::sort(all.begin(), all.end(), [](const NodeEvent& a, const NodeEvent& b) {
    return a.t < b.t || (a.t == b.t && a.node < b.node);
  });

  const double delta = options.delta_cluster;
  const double scale = std::pow(kTwoPi, -static_cast<double>(h.codim()));
  std::size_t begin = 0;
  double previous_end = -std::numeric_limits<double>::infinity();
  while (begin < all.size()) {
    std::size_t end = begin + 1;
    while (end < all.size() && all[end].t - all[end - 1].t <= delta) ++end;
    if (all[begin].t - previous_end < 2.0 * delta)
      throw NumericalError("ambiguous loop clusters near t=" + format_double(round_significant(all[begin].t, 12)));
    previous_end = all[end - 1].t;

    std::vector<NodeEvent> members(all.begin() + static_cast<std::ptrdiff_t>(begin),
                                   all.begin() + static_cast<std::ptrdiff_t>(end));
    std::stable_sort(members.begin(), members.end(),
                     [](const NodeEvent& a, const NodeEvent& b) { return a.node < b.node; });
    ComplexCompensatedSum q;
    CompensatedSum support, times;
    for (const auto& m : members) {
      q.add(m.contribution);
      support.add(m.weight);
      times.add(m.t);
    }
    LoopCluster c;
    c.t = times.value() / static_cast<double>(members.size());
    c.q = scale * q.value();
    c.support_measure = support.value();
    c.node_count = members.size();
    if (c.support_measure >= options.measure_floor * quad.total_measure) table.clusters.push_back(c);
    begin = end;
  }
  return table;
}

double eval_Q(const LoopTable& table, double lambda) {
  CompensatedSum sum;
  for (const auto& c : table.clusters) {
    if (c.t <= 0.0) continue;
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, -c.t * lambda));
    sum.add(2.0 * (phase * c.q / std::complex<double>(0.0, -c.t)).real());
  }
  return sum.value();
}

double averaging_diagnostic(const LoopTable& table, double T) {
  if (!(T > 0.0)) throw ConfigError("averaging diagnostic needs T > 0");
  if (T > table.t_max) throw ConfigError("averaging diagnostic: T exceeds the table horizon t_max");
  CompensatedSum sum;
  for (const auto& c : table.clusters) {
    if (std::abs(c.t) <= T + 1e-9) sum.add(std::abs(c.q));
  }
  return sum.value() / T;
}

double pairing_defect(const LoopTable& table) {
  double worst = 0.0;
  for (const auto& c : table.clusters) {
    const LoopCluster* partner = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : table.clusters) {
      const double gap = std::abs(d.t + c.t);
      if (gap < best) {
        best = gap;
        partner = &d;
      }
    }
    if (partner == nullptr || best > 1e-3) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(partner->q - std::conj(c.q)));
  }
  return worst;
}

ErgodicAverages ergodic_average(const ModelManifold& model, const Submanifold& h, const SnhQuadrature& quad, int K,
                                double t_max, double tol, const FlowOptions& flow_options, const Executor& exec) {
  if (K < 1) throw ConfigError("ergodic average needs K >= 1");
  const std::size_t count = quad.nodes.size();
  struct Chain {
    std::vector<double> values;  // (U^k 1)(node), k = 1..K
    bool dropped = false;
    std::vector<std::string> warnings;
  };
  std::vector<Chain> chains(count);
  exec.for_each_index(count, [&](std::size_t i) {
    Chain& chain = chains[i];
    chain.values.assign(static_cast<std::size_t>(K), 0.0);
    CotangentPoint z = quad.nodes[i].z;
    double amplitude = 1.0;
    try {
      for (int k = 0; k < K; ++k) {
        FirstReturn fr = first_return(model, h, z, t_max, tol, flow_options);
        if (!fr.warnings.empty()) {
          chain.dropped = true;
          chain.warnings = std::move(fr.warnings);
          break;
        }
        if (!fr.finite()) break;
        amplitude *= std::sqrt(*fr.event->jacobian);
        chain.values[static_cast<std::size_t>(k)] = amplitude;
        z = unit_relift(model, h, *fr.event);
      }
    } catch (const NumericalError& e) {
      chain.dropped = true;
      chain.warnings = {e.what()};
    }
  });

  ErgodicAverages out;
  std::vector<CompensatedSum> sums(static_cast<std::size_t>(K));
  CompensatedSum deficit;
  std::size_t warning_count = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double w = quad.nodes[i].weight;
    if (chains[i].dropped) {
      deficit.add(w);
      for (const auto& msg : chains[i].warnings) keep_warning(out.warnings, warning_count, i, msg);
      continue;
    }
    for (int k = 0; k < K; ++k) sums[static_cast<std::size_t>(k)].add(w * chains[i].values[static_cast<std::size_t>(k)]);
  }
  out.mass_deficit = deficit.value();
  CompensatedSum running;
  for (int k = 0; k < K; ++k) {
    const double v = sums[static_cast<std::size_t>(k)].value();
    out.pairings.push_back(v);
    running.add(v);
    out.running_average.push_back(running.value() / (k + 1));
  }
  return out;
}

double recurrence_fraction(const ModelManifold& model, const Submanifold& h, const SnhQuadrature& quad, double delta,
                           double t_max, double tol, const FlowOptions& flow_options, const Executor& exec) {
  if (!(delta > 0.0)) throw ConfigError("recurrence_fraction needs delta > 0");
  const std::size_t count = quad.nodes.size();
  std::vector<char> recurrent(count, 0);
  exec.for_each_index(count, [&](std::size_t i) {
    const CotangentPoint& z = quad.nodes[i].z;
    const DetectResult r = detect_returns(model, h, z, t_max, tol, flow_options);
    for (const auto& e : r.events) {
      if (phase_distance(model, z, unit_relift(model, h, e)) < delta) {
        recurrent[i] = 1;
        break;
      }
    }
  });
  CompensatedSum hit, total;
  for (std::size_t i = 0; i < count; ++i) {
    total.add(quad.nodes[i].weight);
    if (recurrent[i]) hit.add(quad.nodes[i].weight);
  }
  return total.value() > 0.0 ? hit.value() / total.value() : 0.0;
}

nlohmann::json to_json(const LoopTable& table) {
  nlohmann::json j;
  j["model"] = to_json(table.model);
  j["h"] = to_json(table.h);
  j["t_max"] = round_significant(table.t_max, 12);
  j["total_measure"] = table.total_measure;
  j["descriptor_hash"] = hex64(table.descriptor_hash);
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : table.clusters) {
    clusters.push_back({{"t", round_significant(c.t, 12)},
                        {"q_re", c.q.real()},
                        {"q_im", c.q.imag()},
                        {"support_measure", c.support_measure},
                        {"node_count", c.node_count}});
  }
  j["clusters"] = clusters;
  j["warning_count"] = table.warning_count;
  j["warnings"] = table.warnings;
  return j;
}

LoopTable loop_table_from_json(const nlohmann::json& j) {
  LoopTable table;
  try {
    table.model = model_from_json(j.at("model"));
    table.h = submanifold_from_json(j.at("h"));
    table.t_max = j.at("t_max").get<double>();
    table.total_measure = j.value("total_measure", 0.0);
    for (const auto& c : j.at("clusters")) {
      LoopCluster lc;
      lc.t = c.at("t").get<double>();
      lc.q = {c.at("q_re").get<double>(), c.at("q_im").get<double>()};
      lc.support_measure = c.at("support_measure").get<double>();
      lc.node_count = c.value("node_count", std::size_t{0});
      table.clusters.push_back(lc);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed loop table: ") + e.what());
  }
  table.descriptor_hash = fnv1a64(to_json(table.model).dump() + to_json(table.h).dump());
  return table;
}

}  // namespace klab
