#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "klab/check/acceptance.hpp"
#include "klab/experiment.hpp"
#include "klab/io.hpp"

using namespace klab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("klab-test-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(KLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_F(Scratch, SpectrumCsvHasHeaderAndRows) {
  ExperimentConfig c;
  c.lambda_max = 5.0;
  c.out = dir.string();
  cmd_spectrum(c);
  const std::string csv = slurp(dir / "spectrum.csv");
  EXPECT_NE(csv.find("# config_hash=" + hex64(config_hash(c))), std::string::npos);
  EXPECT_NE(csv.find(std::string("# klab ") + kVersion), std::string::npos);
  std::istringstream lines(csv);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#' && line.rfind("lambda,", 0) != 0) ++rows;
  EXPECT_EQ(rows, 81);
}

TEST_F(Scratch, QTableForTorusCircle) {
  ExperimentConfig c;
  c.nodes = 32;
  c.t_max = 10.0;
  c.out = dir.string();
  cmd_qtable(c);
  const auto j = nlohmann::json::parse(slurp(dir / "qtable.json"));
  ASSERT_EQ(j["clusters"].size(), 2u);
  EXPECT_EQ(j["config_hash"], hex64(config_hash(c)));
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_EQ(j["averaging"].size(), 3u);
  EXPECT_TRUE(j["clusters"][0].contains("support_measure"));
}

TEST_F(Scratch, ReportIsIdenticalAcrossThreadCounts) {
  ExperimentConfig c;
  c.nodes = 32;
  c.lambda_max = 40.0;
  c.t_max = 10.0;
  std::string first[3];
  for (int threads : {1, 4}) {
    c.threads = threads;
    c.out = (dir / std::to_string(threads)).string();
    const RunSummary s = cmd_report(c);
    ASSERT_EQ(s.files.size(), 3u);
    for (int i = 0; i < 3; ++i) {
      const std::string body = slurp(s.files[i]);
      EXPECT_NE(body.find(hex64(config_hash(c))), std::string::npos);
      if (threads == 1) first[i] = body;
      else EXPECT_EQ(body, first[i]);
    }
  }
  EXPECT_NE(first[0].find("lambda,N,main_term,q_term,residual"), std::string::npos);
  EXPECT_NE(first[2].find("plot 'counting.csv'"), std::string::npos);
}

TEST(Verify, ShortHorizonSkipsLoopCriteria) {
  ExperimentConfig c;
  c.nodes = 16;
  c.t_max = 1.0;
  int skipped = 0;
  for (const auto& r : check::run_verify(c)) {
    if (r.outcome == check::Outcome::skipped) {
      ++skipped;
      EXPECT_EQ(r.measured, "skipped: horizon below first return");
    }
  }
  EXPECT_EQ(skipped, 4);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = fs::temp_directory_path() / "klab-test-cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "bad.conf") << "model.lattice = 1, 2, 2, 4\n";
  std::ofstream(dir / "typo.conf") << "lamda_max = 3\n";
  EXPECT_EQ(run_cli("spectrum --lambda-max 3 --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "spectrum.csv"));
  EXPECT_EQ(run_cli("spectrum --config " + (dir / "bad.conf").string() + " --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("spectrum --config " + (dir / "typo.conf").string()), 2);
  EXPECT_EQ(run_cli("qtable --nodes 2"), 2);
  EXPECT_EQ(run_cli("spectrum --no-such-flag"), 2);
  EXPECT_EQ(run_cli(""), 2);
  fs::remove_all(dir);
}

TEST(Cli, ErrorLineIsMachineParsable) {
  const fs::path dir = fs::temp_directory_path() / "klab-test-cli-msg";
  fs::create_directories(dir);
  std::ofstream(dir / "bad.conf") << "model.lattice = 1, 2, 2, 4\n";
  const std::string cmd = std::string(KLAB_CLI_PATH) + " spectrum --config " + (dir / "bad.conf").string() +
                          " 2> " + (dir / "err.txt").string();
  ASSERT_NE(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(dir / "err.txt"), "config: singular lattice\n");
  fs::remove_all(dir);
}
