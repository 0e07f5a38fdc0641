#include "klab/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>
#include <vector>

#include "klab/errors.hpp"
#include "klab/io.hpp"

namespace klab {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_plain(const std::string& s, const std::string& key) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s[0] == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw ConfigError("bad number for " + key + ": '" + s + "'");
  return v;
}

// Accepts plain decimals and the forms pi, 2*pi, pi/3, 2*pi/3.
double parse_real(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  static const std::regex pi_form(R"(^(?:([-+]?[0-9.eE+-]+)\s*\*\s*)?(-?)pi(?:\s*/\s*([0-9.eE+-]+))?$)");
  std::smatch m;
  if (std::regex_match(s, m, pi_form)) {
    double v = kPi;
    if (m[1].matched) v *= parse_plain(m[1].str(), key);
    if (m[2].length() > 0) v = -v;
    if (m[3].matched) v /= parse_plain(m[3].str(), key);
    return v;
  }
  return parse_plain(s, key);
}

int parse_int(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("bad integer for " + key + ": '" + s + "'");
  return v;
}

bool parse_bool(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("bad boolean for " + key + ": '" + s + "'");
}

std::vector<double> parse_list(const std::string& raw, const std::string& key) {
  std::vector<double> out;
  std::string s = trim(raw);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_real(item, key));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

enum class Kind { real, integer, text, list, boolean };

struct Field {
  const char* key;
  Kind kind;
  bool runtime;
  std::function<bool(const ExperimentConfig&)> present;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

const auto always = [](const ExperimentConfig&) { return true; };

#define KLAB_REAL(name, member)                                                             \
  Field {                                                                                   \
    name, Kind::real, false, always, [](const ExperimentConfig& c) { return format_double(c.member); }, \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_real(v, name); } \
  }
#define KLAB_INT(name, member)                                                                   \
  Field {                                                                                        \
    name, Kind::integer, false, always, [](const ExperimentConfig& c) { return std::to_string(c.member); }, \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_int(v, name); }       \
  }
#define KLAB_LIST(name, member)                                                         \
  Field {                                                                               \
    name, Kind::list, false, always, [](const ExperimentConfig& c) { return join(c.member); }, \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_list(v, name); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"model.kind", Kind::text, false, always, [](const ExperimentConfig& c) { return to_string(c.model.kind); },
       [](ExperimentConfig& c, const std::string& v) { c.model.kind = parse_model_kind(trim(v)); }},
      KLAB_INT("model.n", model.n),
      KLAB_LIST("model.lattice", model.lattice),
      KLAB_REAL("model.radius", model.radius),
      {"h.kind", Kind::text, false, always, [](const ExperimentConfig& c) { return to_string(c.h.kind); },
       [](ExperimentConfig& c, const std::string& v) { c.h.kind = parse_submanifold_kind(trim(v)); }},
      KLAB_LIST("h.center", h.center),
      KLAB_REAL("h.r", h.r),
      KLAB_REAL("h.theta0", h.theta0),
      KLAB_LIST("h.anchor", h.anchor),
      KLAB_INT("h.dim", h.dim),
      KLAB_REAL("lambda_max", lambda_max),
      KLAB_REAL("t_max", t_max),
      KLAB_INT("nodes", nodes),
      KLAB_INT("fiber_nodes", fiber_nodes),
      KLAB_REAL("kernel_a", kernel_a),
      {"grid.kind", Kind::text, false, always, [](const ExperimentConfig& c) { return c.grid_kind; },
       [](ExperimentConfig& c, const std::string& v) { c.grid_kind = trim(v); }},
      KLAB_REAL("grid.min", grid_min),
      KLAB_REAL("grid.step", grid_step),
      KLAB_REAL("tol", tol),
      {"delta_cluster", Kind::real, false, [](const ExperimentConfig& c) { return c.delta_cluster.has_value(); },
       [](const ExperimentConfig& c) { return format_double(*c.delta_cluster); },
       [](ExperimentConfig& c, const std::string& v) { c.delta_cluster = parse_real(v, "delta_cluster"); }},
      KLAB_REAL("measure_floor", measure_floor),
      {"flow.method", Kind::text, false, always, [](const ExperimentConfig& c) { return to_string(c.flow_method); },
       [](ExperimentConfig& c, const std::string& v) { c.flow_method = parse_flow_method(trim(v)); }},
      KLAB_REAL("flow.step", flow_step),
      KLAB_INT("flow.order", flow_order),
      {"fit_c", Kind::boolean, false, always, [](const ExperimentConfig& c) { return std::string(c.fit_c ? "true" : "false"); },
       [](ExperimentConfig& c, const std::string& v) { c.fit_c = parse_bool(v, "fit_c"); }},
      KLAB_REAL("spectrum_cap", spectrum_cap),
      {"out", Kind::text, true, always, [](const ExperimentConfig& c) { return c.out; },
       [](ExperimentConfig& c, const std::string& v) { c.out = trim(v); }},
      {"threads", Kind::integer, true, always, [](const ExperimentConfig& c) { return std::to_string(c.threads); },
       [](ExperimentConfig& c, const std::string& v) { c.threads = parse_int(v, "threads"); }},
  };
  return table;
}

#undef KLAB_REAL
#undef KLAB_INT
#undef KLAB_LIST

const Field& field(const std::string& key) {
  for (const auto& f : fields()) {
    if (key == f.key) return f;
  }
  throw ConfigError("unknown key '" + key + "'");
}

std::string json_scalar_text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",";
      out += json_scalar_text(v[i], key);
    }
    return out;
  }
  throw ConfigError("unsupported JSON value for " + key);
}

void flatten(const json& j, const std::string& prefix, ExperimentConfig& cfg) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      flatten(*it, key, cfg);
    } else {
      field(key).set(cfg, json_scalar_text(*it, key));
    }
  }
}

json field_json(const Field& f, const ExperimentConfig& cfg) {
  const std::string text = f.get(cfg);
  switch (f.kind) {
    case Kind::real: return parse_real(text, f.key);
    case Kind::integer: return parse_int(text, f.key);
    case Kind::boolean: return parse_bool(text, f.key);
    case Kind::list: {
      json arr = json::array();
      for (double v : parse_list(text, f.key)) arr.push_back(v);
      return arr;
    }
    case Kind::text: return text;
  }
  return text;
}

json build_json(const ExperimentConfig& cfg, bool runtime) {
  json out = json::object();
  for (const auto& f : fields()) {
    if (f.runtime && !runtime) continue;
    if (!f.present(cfg)) continue;
    const std::string key = f.key;
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      out[key] = field_json(f, cfg);
    } else {
      out[key.substr(0, dot)][key.substr(dot + 1)] = field_json(f, cfg);
    }
  }
  return out;
}

}  // namespace

std::string to_string(FlowMethod method) {
  return method == FlowMethod::closed_form ? "closed-form" : "implicit-midpoint";
}

FlowMethod parse_flow_method(const std::string& text) {
  if (text == "closed-form") return FlowMethod::closed_form;
  if (text == "implicit-midpoint") return FlowMethod::implicit_midpoint;
  throw ConfigError("unknown flow method '" + text + "'");
}

double ExperimentConfig::cluster_width() const {
  if (delta_cluster) return *delta_cluster;
  return flow_method == FlowMethod::closed_form ? 1e-6 : 1e-4;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    flatten(j, "", cfg);
    return cfg;
  }
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    field(trim(line.substr(0, eq))).set(cfg, line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string to_key_value(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) {
    if (!f.present(cfg)) continue;
    out += f.key;
    out += " = ";
    out += f.get(cfg);
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const ExperimentConfig& cfg) { return build_json(cfg, true); }

nlohmann::json config_echo(const ExperimentConfig& cfg) { return build_json(cfg, false); }

std::uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a64(config_echo(cfg).dump()); }

void validate_config(const ExperimentConfig& cfg) {
  const ModelManifold model = make_model(cfg.model);
  (void)make_submanifold(model, cfg.h);
  if (!(cfg.lambda_max >= 0.0) || !std::isfinite(cfg.lambda_max)) throw ConfigError("lambda_max must be >= 0");
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) throw ConfigError("t_max must be positive");
  if (cfg.nodes < 8) throw ConfigError("resolution below minimum (8 nodes per H dimension)");
  if (cfg.fiber_nodes < 8) throw ConfigError("resolution below minimum (8 fiber nodes)");
  if (!(cfg.kernel_a > 0.0)) throw ConfigError("kernel_a must be positive");
  if (cfg.grid_kind != "midpoints" && cfg.grid_kind != "uniform")
    throw ConfigError("grid.kind must be midpoints or uniform");
  if (!(cfg.grid_step > 0.0)) throw ConfigError("grid.step must be positive");
  if (!(cfg.grid_min >= 0.0)) throw ConfigError("grid.min must be >= 0");
  if (!(cfg.tol >= 1e-12 && cfg.tol <= 1e-6)) throw ConfigError("tol must lie in [1e-12, 1e-6]");
  const double delta = cfg.cluster_width();
  if (!(delta >= 1e-8 && delta <= 1e-2)) throw ConfigError("delta_cluster must lie in [1e-8, 1e-2]");
  if (!(cfg.measure_floor >= 0.0 && cfg.measure_floor <= 1.0)) throw ConfigError("measure_floor must lie in [0, 1]");
  if (!(cfg.flow_step > 0.0 && cfg.flow_step <= 1e-3)) throw ConfigError("flow.step must lie in (0, 1e-3]");
  if (cfg.flow_order != 2 && cfg.flow_order != 4) throw ConfigError("flow.order must be 2 or 4");
  if (!(cfg.spectrum_cap >= 1.0)) throw ConfigError("spectrum_cap must be >= 1");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
}

nlohmann::json to_json(const ModelDescriptor& m) {
  json j;
  j["kind"] = to_string(m.kind);
  j["n"] = m.n;
  j["lattice"] = m.lattice;
  j["radius"] = m.radius;
  return j;
}

nlohmann::json to_json(const SubmanifoldDescriptor& h) {
  json j;
  j["kind"] = to_string(h.kind);
  j["center"] = h.center;
  j["r"] = h.r;
  j["theta0"] = h.theta0;
  j["anchor"] = h.anchor;
  j["dim"] = h.dim;
  return j;
}

ModelDescriptor model_from_json(const nlohmann::json& j) {
  ModelDescriptor m;
  m.kind = parse_model_kind(j.at("kind").get<std::string>());
  m.n = j.at("n").get<int>();
  m.lattice = j.at("lattice").get<std::vector<double>>();
  m.radius = j.at("radius").get<double>();
  return m;
}

SubmanifoldDescriptor submanifold_from_json(const nlohmann::json& j) {
  SubmanifoldDescriptor h;
  h.kind = parse_submanifold_kind(j.at("kind").get<std::string>());
  h.center = j.at("center").get<std::vector<double>>();
  h.r = j.at("r").get<double>();
  h.theta0 = j.at("theta0").get<double>();
  h.anchor = j.at("anchor").get<std::vector<double>>();
  h.dim = j.at("dim").get<int>();
  return h;
}

}  // namespace klab
