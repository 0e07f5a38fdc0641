#include <cstdlib>

#include <gtest/gtest.h>

#include "klab/config.hpp"
#include "klab/errors.hpp"
#include "klab/io.hpp"

using namespace klab;

TEST(Config, Defaults) {
  const ExperimentConfig c;
  EXPECT_EQ(c.model.kind, ModelKind::flat_torus);
  EXPECT_EQ(c.h.kind, SubmanifoldKind::embedded_circle);
  EXPECT_EQ(c.lambda_max, 100.0);
  EXPECT_EQ(c.nodes, 256);
  EXPECT_EQ(c.cluster_width(), 1e-6);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, KeyValueWithPiExpressions) {
  const ExperimentConfig c = parse_config(
      "# comment\n"
      "model.kind = round-sphere\n"
      "model.radius = 2\n"
      "h.kind = latitude-circle\n"
      "h.theta0 = pi/3   # trailing comment\n"
      "t_max = 4*pi\n"
      "flow.method = implicit-midpoint\n"
      "threads = 3\n");
  EXPECT_EQ(c.model.kind, ModelKind::round_sphere);
  EXPECT_EQ(c.model.radius, 2.0);
  EXPECT_NEAR(c.h.theta0, kPi / 3.0, 1e-16);
  EXPECT_NEAR(c.t_max, 4.0 * kPi, 1e-15);
  EXPECT_EQ(c.flow_method, FlowMethod::implicit_midpoint);
  EXPECT_EQ(c.cluster_width(), 1e-4);
  EXPECT_EQ(c.threads, 3);
}

TEST(Config, JsonNestedAndDotted) {
  const ExperimentConfig a = parse_config(R"({"model": {"kind": "flat-torus", "lattice": [1, 0, 0, 2]},
                                              "h": {"kind": "point", "anchor": [0.1, 0.2]}, "nodes": 32})");
  const ExperimentConfig b =
      parse_config(R"({"model.lattice": [1, 0, 0, 2], "h.kind": "point", "h.anchor": [0.1, 0.2], "nodes": 32})");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.model.lattice, (std::vector<double>{1, 0, 0, 2}));
  EXPECT_EQ(a.h.kind, SubmanifoldKind::point);
}

TEST(Config, RoundTrips) {
  ExperimentConfig c;
  c.model.lattice = {3.0, 0.5, -1.0, 4.0};
  c.h.center = {0.1, 0.2};
  c.h.r = 0.3;
  c.delta_cluster = 1e-5;
  c.fit_c = false;
  c.grid_kind = "uniform";
  c.out = "somewhere";
  c.threads = 2;
  EXPECT_EQ(parse_config(to_key_value(c)), c);
  EXPECT_EQ(parse_config(to_json(c).dump()), c);
}

TEST(Config, EchoAndHashIgnoreRuntimeKeys) {
  ExperimentConfig a, b;
  b.out = "/elsewhere";
  b.threads = 8;
  EXPECT_EQ(config_echo(a), config_echo(b));
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_FALSE(config_echo(a).contains("out"));
  EXPECT_FALSE(config_echo(a).contains("threads"));
  b.lambda_max = 50.0;
  EXPECT_NE(config_hash(a), config_hash(b));
  // Guards the output format: changing it changes every output header.
  EXPECT_EQ(hex64(config_hash(a)), "9a364333da8af872");
}

TEST(Config, Errors) {
  try {
    parse_config("lamda_max = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "unknown key 'lamda_max'");
  }
  EXPECT_THROW(parse_config("nodes = many\n"), ConfigError);
  EXPECT_THROW(parse_config("nodes\n"), ConfigError);
  EXPECT_THROW(parse_config("{\"nodes\": }"), ConfigError);
  EXPECT_THROW(parse_config("flow.method = rk4\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/klab.conf"), ConfigError);
}

TEST(Config, ValidationRejectsBadValues) {
  const auto bad = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    EXPECT_THROW(validate_config(c), ConfigError);
  };
  bad([](ExperimentConfig& c) { c.model.lattice = {1, 2, 2, 4}; });
  bad([](ExperimentConfig& c) { c.lambda_max = -1; });
  bad([](ExperimentConfig& c) { c.t_max = 0; });
  bad([](ExperimentConfig& c) { c.nodes = 4; });
  bad([](ExperimentConfig& c) { c.kernel_a = 0; });
  bad([](ExperimentConfig& c) { c.grid_kind = "log"; });
  bad([](ExperimentConfig& c) { c.tol = 1e-3; });
  bad([](ExperimentConfig& c) { c.delta_cluster = 1.0; });
  bad([](ExperimentConfig& c) { c.measure_floor = 2.0; });
  bad([](ExperimentConfig& c) { c.flow_step = 0.01; });
  bad([](ExperimentConfig& c) { c.flow_order = 3; });
  bad([](ExperimentConfig& c) { c.threads = 0; });
  bad([](ExperimentConfig& c) { c.h.kind = SubmanifoldKind::latitude_circle; });
}

TEST(Io, ShortestRoundTripFormatting) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(1e-10), "1e-10");
  for (double v : {kPi, -1.0 / 3.0, 6.02214076e23, 5e-324}) EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
}

TEST(Io, RoundSignificant) {
  EXPECT_EQ(round_significant(kTwoPi, 12), 6.28318530718);
  EXPECT_EQ(round_significant(-2.0000000000004, 12), -2.0);
  EXPECT_EQ(round_significant(0.0, 12), 0.0);
}

TEST(Io, Fnv1a64KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(hex64(0x1f), "000000000000001f");
}
