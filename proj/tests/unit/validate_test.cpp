#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include <blockopt/error.hpp>
#include <blockopt/grid.hpp>
#include <blockopt/rng.hpp>
#include <blockopt/validate.hpp>

namespace blockopt {
namespace {

ProblemDefinition test_problem(std::uint64_t seed) {
  ProblemDefinition p;
  auto d = generate_synthetic({40, 40, 40}, 0.0, 1.0, seed);
  p.reference_extreme_q = global_max(d);
  p.fit_domain = std::make_shared<const GriddedDomain>(std::move(d));
  p.bounds = {20, 20, 20};
  return p;
}

TEST(Validate, SingleProblemGivesMeansOnly) {
  const std::vector<BlockSpec> specs{{2, 5, 2}};
  const std::vector<ProblemDefinition> problems{test_problem(1)};
  const auto rep = out_of_sample(specs, problems);
  ASSERT_EQ(rep.rows.size(), 1u);
  const auto& row = rep.rows[0];
  const auto direct = eval_objectives(problems[0], specs[0]);
  EXPECT_EQ(*row.mean_f1, direct.f1);
  EXPECT_EQ(*row.mean_f2, direct.f2);
  EXPECT_FALSE(row.std_f1.has_value());
  EXPECT_FALSE(row.std_f2.has_value());
}

TEST(Validate, IdenticalProblemsHaveZeroSpread) {
  const std::vector<BlockSpec> specs{{2, 5, 2}, {4, 4, 4}};
  const std::vector<ProblemDefinition> problems(5, test_problem(2));
  const auto rep = out_of_sample(specs, problems);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.count(), 5u);
    EXPECT_EQ(*row.std_f1, 0.0);
    EXPECT_EQ(*row.std_f2, 0.0);
  }
}

TEST(Validate, AggregatesMatchDirectStatistics) {
  const std::vector<BlockSpec> specs{{3, 3, 3}};
  const auto rep = out_of_sample(specs, 6, [](std::size_t i) { return test_problem(100 + i); }, 3);
  const auto& row = rep.rows[0];
  ASSERT_EQ(row.count(), 6u);
  double m = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto e = eval_objectives(test_problem(100 + i), specs[0]);
    EXPECT_EQ(row.f1[i], e.f1);
    m += e.f1;
  }
  m /= 6.0;
  double ss = 0.0;
  for (double v : row.f1) ss += (v - m) * (v - m);
  EXPECT_NEAR(*row.mean_f1, m, 1e-15);
  EXPECT_NEAR(*row.std_f1, std::sqrt(ss / 5.0), 1e-15);
  const auto serial = out_of_sample(specs, 6, [](std::size_t i) { return test_problem(100 + i); }, 1);
  EXPECT_EQ(serial.rows[0].f2, row.f2);
}

TEST(Validate, InfeasibleSpecsAreFootnoted) {
  const std::vector<BlockSpec> specs{{30, 2, 2}, {1, 1, 1}, {2, 2, 2}};
  const std::vector<ProblemDefinition> problems{test_problem(3), test_problem(4)};
  const auto rep = out_of_sample(specs, problems);
  EXPECT_EQ(rep.rows[0].failures.size(), 2u);
  EXPECT_EQ(rep.rows[0].count(), 0u);
  EXPECT_FALSE(rep.rows[0].mean_f1.has_value());
  EXPECT_EQ(rep.rows[1].failures.size(), 2u);
  EXPECT_EQ(rep.rows[2].count(), 2u);
  EXPECT_THROW(out_of_sample({}, problems), InvalidArgument);
}

TEST(Validate, SpearmanWithoutTies) {
  Rng rng(1);
  std::vector<double> x(30), y(30);
  for (std::size_t i = 0; i < 30; ++i) {
    x[i] = rng.uniform();
    y[i] = x[i] + 0.3 * rng.normal();
  }
  // Classical formula with rank differences.
  const auto rank = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      r[i] = 1.0;
      for (double w : v) r[i] += w < v[i];
    }
    return r;
  };
  const auto rx = rank(x), ry = rank(y);
  double d2 = 0.0;
  for (std::size_t i = 0; i < 30; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  EXPECT_NEAR(*spearman(x, y), 1.0 - 6.0 * d2 / (30.0 * (900.0 - 1.0)), 1e-12);
}

TEST(Validate, SpearmanWithTiesAndDegenerateInput) {
  const std::vector<double> x{1, 2, 2, 3}, y{1, 3, 2, 4};
  EXPECT_NEAR(*spearman(x, y), 4.5 / std::sqrt(22.5), 1e-15);
  const std::vector<double> c{5, 5, 5, 5};
  EXPECT_FALSE(spearman(x, c).has_value());
  const std::vector<double> dec{4, 3, 2, 1}, inc{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(*spearman(inc, dec), -1.0);
}

}  // namespace
}  // namespace blockopt
