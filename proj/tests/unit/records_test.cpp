#include <charconv>
#include <memory>
#include <sstream>

#include <gtest/gtest.h>

#include <blockopt/baselines.hpp>
#include <blockopt/grid.hpp>
#include <blockopt/records.hpp>
#include <blockopt/rng.hpp>

namespace blockopt {
namespace {

OptimizationResult small_run() {
  ProblemDefinition p;
  auto d = generate_synthetic({40, 40}, 0.0, 1.0, 8);
  p.reference_extreme_q = global_max(d);
  p.fit_domain = std::make_shared<const GriddedDomain>(std::move(d));
  p.bounds = {20, 20};
  OptimizerConfig cfg;
  cfg.seed = 3;
  cfg.max_iterations = 40;
  return run(p, cfg);
}

TEST(Records, NumbersRoundTrip) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform_int(-30, 30));
    const std::string s = format_number(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
  EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(Records, RunLogRoundTrip) {
  const auto res = small_run();
  std::ostringstream a;
  write_run_log(a, res.log);
  EXPECT_EQ(a.str().find("wall_seconds"), std::string::npos);
  std::istringstream in(a.str());
  const auto back = read_run_log(in);
  ASSERT_EQ(back.size(), res.log.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].spec, res.log[i].spec);
    EXPECT_EQ(back[i].phase, res.log[i].phase);
    EXPECT_EQ(back[i].reference, res.log[i].reference);
    EXPECT_EQ(back[i].c_eps, res.log[i].c_eps);
  }
  std::ostringstream b;
  write_run_log(b, back);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(replay_archive(back, res.reference), res.archive);

  std::ostringstream timed;
  write_run_log(timed, res.log, true);
  EXPECT_NE(timed.str().find("wall_seconds"), std::string::npos);
}

TEST(Records, ArchiveRoundTrip) {
  const auto res = small_run();
  std::ostringstream out;
  write_archive(out, res.archive);
  std::istringstream in(out.str());
  const auto rows = read_archive(in);
  ASSERT_FALSE(res.archive.empty());
  ASSERT_EQ(rows.size(), res.archive.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].spec, res.archive.solutions()[i]);
    EXPECT_EQ(rows[i].point, res.archive.points()[i]);
  }
  std::istringstream again(out.str());
  EXPECT_EQ(read_spec_list(again).size(), rows.size());
  std::istringstream plain("2,43,2\n\n(2,2,29)\n");
  EXPECT_EQ(read_spec_list(plain), (std::vector<BlockSpec>{{2, 43, 2}, {2, 2, 29}}));
}

TEST(Records, OptimizerTraceIsIndexedByEvaluation) {
  const auto res = small_run();
  const auto t = make_trace(res);
  ASSERT_EQ(t.hv_trajectory.size(), res.log.size() + 1);
  EXPECT_EQ(t.hv_trajectory.front(), 0.0);
  EXPECT_EQ(t.final_hv(), res.archive.hypervolume());
  const RunTrace traces[] = {t};
  EXPECT_EQ(compare_hv({}, t).rows.front().evaluations, res.log.size());
  EXPECT_EQ(compare_hv(traces, t).rows.back().pct_mobo_gain.value_or(-1.0), 0.0);
}

TEST(Records, TraceRoundTrip) {
  const RunTrace t{"random-s1", Strategy::Random, {0.25, 0.125}, {0, 0.1, 0.3}, {}};
  std::ostringstream out;
  write_trace(out, t);
  std::istringstream in(out.str());
  const auto back = read_trace(in);
  EXPECT_EQ(back.label, t.label);
  EXPECT_EQ(back.strategy, t.strategy);
  EXPECT_EQ(back.reference, t.reference);
  EXPECT_EQ(back.hv_trajectory, t.hv_trajectory);
}

}  // namespace
}  // namespace blockopt
