#pragma once

#include <functional>
#include <string>
#include <vector>

#include "klab/config.hpp"

namespace klab::check {

enum class Outcome { pass, fail, skipped };

struct CriterionResult {
  std::string id;  // criterion number, with the geometry when it has several parts
  std::string title;
  Outcome outcome = Outcome::skipped;
  std::string measured;
  std::string threshold;
  /// Where the expected value comes from: "reference" (stated closed-form
  /// value), "oracle" (independent computation) or "calibration" (chosen
  /// threshold).
  std::string basis;
  double seconds = 0.0;
};

std::string format_result(const CriterionResult& r);

using ResultSink = std::function<void(const CriterionResult&)>;

/// Unit circle on R^2 / (2 pi Z)^2, the default config.
ExperimentConfig torus_circle_config();
/// Generic point on R^2 / (2 pi Z)^2.
ExperimentConfig torus_point_config();
/// Equator of the unit sphere.
ExperimentConfig sphere_equator_config();

/// Criteria applicable to the geometry of cfg. Config values for nodes,
/// tolerances, flow method, threads and t_max are honoured; parameters fixed by
/// a criterion (lambda_max, horizons, K, delta) are not.
std::vector<CriterionResult> run_verify(const ExperimentConfig& cfg, const ResultSink& sink = {});

/// Criteria 1-14 over the three reference geometries.
std::vector<CriterionResult> run_suite(int threads, const ResultSink& sink = {});

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace klab::check
