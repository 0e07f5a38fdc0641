#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "klab/flow.hpp"
#include "klab/geometry.hpp"
#include "klab/numeric.hpp"

namespace klab {

/// Everything an experiment needs. Read from key=value lines or a single JSON
/// object (nested or with dotted keys); both forms round-trip.
struct ExperimentConfig {
  ModelDescriptor model;
  SubmanifoldDescriptor h = [] {
    SubmanifoldDescriptor d;
    d.center = {kPi, kPi};
    return d;
  }();

  double lambda_max = 100.0;
  double t_max = 8.0 * kPi;
  int nodes = 256;        // per periodic H dimension
  int fiber_nodes = 64;   // on the normal sphere when codim >= 2
  double kernel_a = 0.5;

  std::string grid_kind = "midpoints";  // midpoints | uniform
  double grid_min = 0.0;
  double grid_step = 0.01;  // uniform grid only

  double tol = 1e-10;
  std::optional<double> delta_cluster;  // default depends on the flow method
  double measure_floor = 0.02;

  FlowMethod flow_method = FlowMethod::closed_form;
  double flow_step = 1e-3;
  int flow_order = 4;

  bool fit_c = true;
  double spectrum_cap = 1e7;

  // Runtime only; not part of the echo or the hash.
  std::string out = ".";
  int threads = 1;

  bool operator==(const ExperimentConfig&) const = default;

  FlowOptions flow_options() const { return {flow_method, flow_step, flow_order}; }
  double cluster_width() const;
  SnhResolution resolution() const { return {nodes, fiber_nodes}; }
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// key = value lines, including runtime keys.
std::string to_key_value(const ExperimentConfig& cfg);
/// Nested JSON object, including runtime keys.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Config as embedded in outputs: the JSON form without `out` and `threads`.
nlohmann::json config_echo(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Checks every module precondition before any computation. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

nlohmann::json to_json(const ModelDescriptor& m);
nlohmann::json to_json(const SubmanifoldDescriptor& h);
ModelDescriptor model_from_json(const nlohmann::json& j);
SubmanifoldDescriptor submanifold_from_json(const nlohmann::json& j);

std::string to_string(FlowMethod method);
FlowMethod parse_flow_method(const std::string& text);

}  // namespace klab
