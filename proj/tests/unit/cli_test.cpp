#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "config.hpp"

namespace blockopt::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("blockopt_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = write_config("config.json", R"({
  "data": {"source": "synthetic", "shape": [40, 200], "mean": 0.0, "stddev": 1.0, "seed": 3},
  "problem": {"bounds": [40], "coupling": [1, 5]},
  "optimizer": {"window": 5, "seed": 1},
  "baselines": {"structured_budget": 8},
  "validation": {"replications": 3, "seed": 2},
  "output": {"directory": "unused"}
})");
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "blockopt");
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  fs::path dir_;
  fs::path config_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, OptimizeWritesArtifacts) {
  const auto o = (dir_ / "opt").string();
  ASSERT_EQ(cli({"optimize", "--config", config_.string(), "--out", o}), kExitOk) << err_.str();
  for (const char* f : {"run_log.jsonl", "archive.tsv", "hv_trajectory.tsv", "summary.json", "trace.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(o) / f)) << f;
  }
  EXPECT_FALSE(fs::exists(fs::path(o) / "timing.tsv"));
}

TEST_F(CliTest, RerunIsBitIdentical) {
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(cli({"optimize", "--config", config_.string(), "--out", a.string(), "--seed", "4"}), kExitOk);
  ASSERT_EQ(cli({"optimize", "--config", config_.string(), "--out", b.string(), "--seed", "4"}), kExitOk);
  for (const char* f : {"run_log.jsonl", "archive.tsv", "summary.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST_F(CliTest, TimingModeAddsWallTimes) {
  const auto o = dir_ / "t";
  ASSERT_EQ(cli({"optimize", "--config", config_.string(), "--out", o.string(), "--timing"}), kExitOk);
  EXPECT_TRUE(fs::exists(o / "timing.tsv"));
  EXPECT_NE(slurp(o / "summary.json").find("wall_seconds"), std::string::npos);
}

TEST_F(CliTest, MissingDataFileLeavesNoArtifacts) {
  const auto cfg = write_config("missing.json", R"({
  "data": {"source": "file", "path": "/nonexistent/surface.txt"},
  "problem": {"bounds": [10, 10]}
})");
  const auto o = dir_ / "none";
  EXPECT_EQ(cli({"optimize", "--config", cfg.string(), "--out", o.string()}), kExitData);
  EXPECT_FALSE(fs::exists(o));
}

TEST_F(CliTest, ConfigErrorsAreUsageErrors) {
  const auto cfg = write_config("typo.json", R"({
  "data": {"source": "synthetic", "shape": [40, 200]},
  "problem": {"bounds": [40], "coupling": [1, 5]},
  "optimizer": {"windw": 5}
})");
  EXPECT_EQ(cli({"optimize", "--config", cfg.string(), "--out", (dir_ / "x").string()}), kExitUsage);
  EXPECT_NE(err_.str().find("optimizer.windw"), std::string::npos);
  EXPECT_EQ(cli({"optimize"}), kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}), kExitUsage);
  EXPECT_THROW(parse_config("{\"problem\": {\"bounds\": [0]}}"), InvalidArgument);
}

TEST_F(CliTest, BundledConfigsParse) {
  for (const char* name : {"study_1d.json", "study_2d.json", "study_3d.json"}) {
    EXPECT_NO_THROW(load_config(fs::path(BLOCKOPT_CONFIG_DIR) / name)) << name;
  }
}

TEST_F(CliTest, BaselinesAndComparison) {
  const auto o = dir_ / "run";
  const std::string c = config_.string(), os = o.string();
  ASSERT_EQ(cli({"optimize", "--config", c, "--out", os}), kExitOk);
  ASSERT_EQ(cli({"enumerate", "--config", c, "--out", os, "--mobo-run", os}), kExitOk) << err_.str();
  EXPECT_EQ(std::count(std::istreambuf_iterator<char>(std::ifstream(o / "enumeration_evaluations.tsv").rdbuf()), {}, '\n'), 41);
  for (const char* seed : {"1", "2", "3"}) {
    ASSERT_EQ(cli({"baseline", "--config", c, "--out", os, "--strategy", "random", "--seed", seed, "--mobo-run", os}),
              kExitOk)
        << err_.str();
  }
  EXPECT_NE(slurp(o / "random-s1_evaluations.tsv"), slurp(o / "random-s2_evaluations.tsv"));
  ASSERT_EQ(cli({"baseline", "--config", c, "--out", os, "--strategy", "structured", "--mobo-run", os}), kExitOk);

  ASSERT_EQ(cli({"compare", "--out", os, "--mobo", os, "--runs", (o / "random-s1_trace.json").string(),
                 (o / "random-s2_trace.json").string(), (o / "random-s3_trace.json").string(),
                 (o / "structured_trace.json").string()}),
            kExitOk)
      << err_.str();
  const auto table = slurp(o / "comparison.tsv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 6);  // header + 5 rows

  ASSERT_EQ(cli({"compare", "--out", os, "--mobo", os, "--runs", (o / "trace.json").string()}), kExitOk);
  EXPECT_NE(out_.str().find("\t0\t"), std::string::npos);

  EXPECT_NE(cli({"compare", "--out", os, "--mobo", os, "--runs", (o / "nope.json").string()}), kExitOk);

  ASSERT_EQ(cli({"baseline", "--config", c, "--out", os, "--strategy", "random", "--reference", "9,9",
                 "--budget", "5"}),
            kExitOk);
  EXPECT_EQ(cli({"compare", "--out", os, "--mobo", os, "--runs", (o / "random-s1_trace.json").string()}),
            kExitUsage);
}

TEST_F(CliTest, ValidateFront) {
  const auto o = dir_ / "v";
  const std::string c = config_.string(), os = o.string();
  ASSERT_EQ(cli({"optimize", "--config", c, "--out", os}), kExitOk);
  ASSERT_EQ(cli({"validate", "--config", c, "--out", os, "--front", (o / "archive.tsv").string()}), kExitOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(o / "validation.tsv"));
  std::ofstream(dir_ / "empty.txt") << "";
  EXPECT_NE(cli({"validate", "--config", c, "--out", os, "--front", (dir_ / "empty.txt").string()}), kExitOk);
}

TEST_F(CliTest, SimulatedSurfaceFeedsFileSource) {
  const auto o = dir_ / "sim";
  ASSERT_EQ(cli({"simulate", "--config", config_.string(), "--out", o.string(), "--format", "text"}), kExitOk);
  ASSERT_TRUE(fs::exists(o / "surface.txt"));
  const auto cfg = write_config("file.json", R"({
  "data": {"source": "file", "path": ")" + (o / "surface.txt").string() + R"("},
  "problem": {"bounds": [40], "coupling": [1, 5]},
  "optimizer": {"window": 5, "seed": 1}
})");
  const auto a = dir_ / "from_file", b = dir_ / "from_recipe";
  ASSERT_EQ(cli({"optimize", "--config", cfg.string(), "--out", a.string()}), kExitOk) << err_.str();
  ASSERT_EQ(cli({"optimize", "--config", config_.string(), "--out", b.string()}), kExitOk);
  EXPECT_EQ(slurp(a / "run_log.jsonl"), slurp(b / "run_log.jsonl"));
}

}  // namespace
}  // namespace blockopt::cli
