#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "klab/config.hpp"
#include "klab/counting.hpp"
#include "klab/loop_table.hpp"
#include "klab/spectrum.hpp"

namespace klab {

struct RunSummary {
  std::vector<std::string> files;
  std::vector<std::string> notes;
};

/// Header lines (without comment markers) naming the version, config hash and
/// config echo.
std::string output_header(const ExperimentConfig& cfg);

LoopTable compute_loop_table(const ExperimentConfig& cfg, const Executor& exec);

/// spectrum.csv
RunSummary cmd_spectrum(const ExperimentConfig& cfg);
/// qtable.json
RunSummary cmd_qtable(const ExperimentConfig& cfg);
/// counting.csv, report.json, figure1.gp
RunSummary cmd_report(const ExperimentConfig& cfg);

/// The qtable.json document.
nlohmann::json qtable_document(const ExperimentConfig& cfg, const LoopTable& table);

}  // namespace klab
