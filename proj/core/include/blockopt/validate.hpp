#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blockopt/objectives.hpp"

namespace blockopt {

struct ReplicationFailure {
  std::size_t replication = 0;
  std::string reason;
};

/// Aggregates of one spec over the test problems. Standard deviations use
/// the n - 1 denominator and are empty for fewer than two feasible values.
struct ValidationRow {
  BlockSpec spec;
  std::vector<std::size_t> replications;  ///< indices of the feasible test problems
  std::vector<double> f1;
  std::vector<double> f2;
  std::vector<ReplicationFailure> failures;
  std::optional<double> mean_f1, std_f1, mean_f2, std_f2;

  std::size_t count() const { return f1.size(); }
};

struct ValidationReport {
  std::vector<ValidationRow> rows;  ///< in the order of the input specs
  std::size_t test_problems = 0;
};

/// Fills the mean and std fields from the raw values.
void aggregate(ValidationRow& row);

ValidationReport out_of_sample(std::span<const BlockSpec> specs, std::span<const ProblemDefinition> test_problems,
                               unsigned workers = 1);

/// Same, building test problem i on demand so that only `workers` domains
/// are alive at once.
ValidationReport out_of_sample(std::span<const BlockSpec> specs, std::size_t count,
                               const std::function<ProblemDefinition(std::size_t)>& make_problem,
                               unsigned workers = 1);

/// Spearman rank correlation (average ranks for ties); empty if either side is constant.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

}  // namespace blockopt
