#include "klab/experiment.hpp"

#include <filesystem>

#include "klab/errors.hpp"
#include "klab/io.hpp"

namespace klab {
namespace {

std::string comment_block(const std::string& text) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    out += "# " + text.substr(start, end == std::string::npos ? std::string::npos : end - start) + "\n";
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::string prepare_out(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out);
  return (std::filesystem::path(cfg.out) / name).string();
}

nlohmann::json stamp(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["config_hash"] = hex64(config_hash(cfg));
  j["config"] = config_echo(cfg);
  return j;
}

}  // namespace

std::string output_header(const ExperimentConfig& cfg) {
  return std::string("klab ") + kVersion + "\nconfig_hash=" + hex64(config_hash(cfg)) +
         "\nconfig=" + config_echo(cfg).dump();
}

LoopTable compute_loop_table(const ExperimentConfig& cfg, const Executor& exec) {
  const ModelManifold model = make_model(cfg.model);
  const Submanifold h = make_submanifold(model, cfg.h);
  const SnhQuadrature quad = snh_quadrature(model, h, cfg.resolution());
  LoopTableOptions opt;
  opt.t_max = cfg.t_max;
  opt.tol = cfg.tol;
  opt.delta_cluster = cfg.cluster_width();
  opt.measure_floor = cfg.measure_floor;
  opt.flow = cfg.flow_options();
  return build_loop_table(model, h, quad, opt, exec);
}

RunSummary cmd_spectrum(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const Executor exec(cfg.threads);
  const ModelManifold model = make_model(cfg.model);
  const Submanifold h = make_submanifold(model, cfg.h);
  const SpectrumTable table = enumerate_spectrum(model, h, cfg.lambda_max, exec, cfg.spectrum_cap);
  const std::string path = prepare_out(cfg, "spectrum.csv");
  write_text_file(path, spectrum_csv(table, output_header(cfg)));
  RunSummary s;
  s.files.push_back(path);
  s.notes.push_back(std::to_string(table.items.size()) + " items");
  return s;
}

nlohmann::json qtable_document(const ExperimentConfig& cfg, const LoopTable& table) {
  nlohmann::json j = stamp(cfg);
  const nlohmann::json body = to_json(table);
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  nlohmann::json avg = nlohmann::json::array();
  for (double frac : {0.25, 0.5, 1.0}) {
    const double T = frac * table.t_max;
    avg.push_back({{"T", round_significant(T, 12)}, {"A", averaging_diagnostic(table, T)}});
  }
  j["averaging"] = avg;
  return j;
}

RunSummary cmd_qtable(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const LoopTable table = compute_loop_table(cfg, Executor(cfg.threads));
  const std::string path = prepare_out(cfg, "qtable.json");
  write_text_file(path, qtable_document(cfg, table).dump(2) + "\n");
  RunSummary s;
  s.files.push_back(path);
  s.notes.push_back(std::to_string(table.clusters.size()) + " clusters");
  if (table.warning_count) s.notes.push_back(std::to_string(table.warning_count) + " detection warnings");
  return s;
}

RunSummary cmd_report(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const Executor exec(cfg.threads);
  const ModelManifold model = make_model(cfg.model);
  const Submanifold h = make_submanifold(model, cfg.h);
  const SpectrumTable spectrum = enumerate_spectrum(model, h, cfg.lambda_max, exec, cfg.spectrum_cap);
  const CountingFunction ncf = staircase(spectrum);
  const LoopTable table = compute_loop_table(cfg, exec);
  const double C = main_constant(model, h);
  const int exponent = h.codim();

  const std::vector<double> grid = cfg.grid_kind == "midpoints"
                                       ? midpoint_grid(ncf, cfg.grid_min, cfg.lambda_max)
                                       : uniform_grid(cfg.grid_min, cfg.lambda_max, cfg.grid_step);
  const TwoTermReport rep =
      two_term_report(ncf, C, exponent, [&](double x) { return eval_Q(table, x); }, grid, cfg.fit_c, exec);

  const SmoothingKernel kernel = make_kernel(cfg.kernel_a);
  std::vector<double> smooth_grid;
  for (double x = 10.0; x <= 0.5 * cfg.lambda_max; x += 10.0) smooth_grid.push_back(x);
  const std::vector<double> smoothed = convolve_grid(ncf, kernel, smooth_grid, ConvolutionMode::dN, exec);

  RunSummary s;
  const std::string header = output_header(cfg);

  std::string csv = comment_block(header);
  csv += "lambda,N,main_term,q_term,residual\n";
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    csv += format_double(rep.grid[i]) + "," + format_double(rep.n_values[i]) + "," + format_double(rep.main_term[i]) +
           "," + format_double(rep.correction[i]) + "," + format_double(rep.residual[i]) + "\n";
  }
  const std::string csv_path = prepare_out(cfg, "counting.csv");
  write_text_file(csv_path, csv);
  s.files.push_back(csv_path);

  nlohmann::json j = stamp(cfg);
  j["main_constant"] = C;
  j["exponent"] = exponent;
  j["fit_c"] = rep.c0_fitted;
  j["c0"] = rep.c0;
  nlohmann::json windows = nlohmann::json::array();
  for (const auto& w : rep.windows)
    windows.push_back({{"lo", w.lo}, {"hi", w.hi}, {"count", w.count}, {"mean_abs", w.mean_abs}, {"max_abs", w.max_abs}});
  j["windows"] = windows;
  j["kernel"] = {{"a", kernel.a()}, {"peak", kernel.peak()}, {"tail_radius", kernel.tail_radius()}};
  nlohmann::json sm = nlohmann::json::array();
  for (std::size_t i = 0; i < smooth_grid.size(); ++i) sm.push_back({{"lambda", smooth_grid[i]}, {"dN_rho", smoothed[i]}});
  j["smoothed"] = sm;
  j["spectrum_items"] = spectrum.items.size();
  nlohmann::json times = nlohmann::json::array();
  for (const auto& c : table.clusters) times.push_back(round_significant(c.t, 12));
  j["loop_times"] = times;
  j["warnings"] = rep.warnings;
  const std::string json_path = prepare_out(cfg, "report.json");
  write_text_file(json_path, j.dump(2) + "\n");
  s.files.push_back(json_path);

  std::string gp = comment_block(header);
  gp += "set datafile separator ','\n";
  gp += "set terminal pngcairo size 1000,600\n";
  gp += "set output 'figure1.png'\n";
  gp += "set key top left\n";
  gp += "set xlabel 'lambda'\n";
  gp += "set ylabel 'N(lambda)'\n";
  gp += "plot 'counting.csv' using 1:2 with steps lw 1 title 'N', \\\n";
  gp += "     '' using 1:3 with lines dt 2 title 'main term', \\\n";
  gp += "     '' using 1:($3+$4) with lines title 'main term + Q correction'\n";
  const std::string gp_path = prepare_out(cfg, "figure1.gp");
  write_text_file(gp_path, gp);
  s.files.push_back(gp_path);

  for (const auto& w : rep.warnings) s.notes.push_back(w);
  return s;
}

}  // namespace klab
