#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blockopt/mobo.hpp"
#include "blockopt/objectives.hpp"
#include "blockopt/pareto.hpp"

namespace blockopt {

enum class Strategy { Enumeration, Random, Structured, Mobo };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// Specs scored by one comparison strategy, in evaluation order.
struct BaselineRun {
  Strategy strategy = Strategy::Random;
  std::vector<Evaluation> evaluations;
  Point2 reference;
  /// HV_0 = 0, then the archive HV after each evaluation.
  std::vector<double> hv_trajectory;
  ParetoArchive archive;
  std::size_t budget = 0;
};

struct EnumerationResult {
  BaselineRun run;
  /// Indices into run.evaluations of the exact non-dominated set, by f1.
  std::vector<std::size_t> front;
};

struct BaselineOptions {
  Point2 reference{0.0, 0.0};
  unsigned workers = 1;
  ObjectiveCache* cache = nullptr;
};

/// Scores every lattice point (lexicographic order). Refuses lattices larger than `cap`.
EnumerationResult enumerate_all(const ProblemDefinition& problem, const BaselineOptions& opts = {},
                                std::size_t cap = 100000);

/// `budget` distinct uniform draws from the lattice, scored in draw order.
BaselineRun random_baseline(const ProblemDefinition& problem, std::size_t budget, std::uint64_t seed,
                            const BaselineOptions& opts = {});

/// Levels per dimension for an n-D structured grid: the smallest product
/// >= budget with max - min <= 2, preferring non-increasing vectors.
std::vector<int> structured_levels(std::span<const int> bounds, std::size_t budget);

/// `count` equidistant values in [1, U]: start 2, step floor(U / count).
std::vector<int> equidistant_levels(int upper, int count);

/// The structured point set, before evaluation: the level grid in row-major
/// order with corners, then the centre, then trailing points removed.
std::vector<BlockSpec> structured_points(std::span<const int> bounds, std::size_t budget,
                                         std::optional<std::vector<int>> levels = std::nullopt);

BaselineRun structured_grid(const ProblemDefinition& problem, std::size_t budget, const BaselineOptions& opts = {},
                            std::optional<std::vector<int>> levels = std::nullopt);

/// Evaluates `specs` in order and builds the run bookkeeping.
BaselineRun score_specs(const ProblemDefinition& problem, Strategy strategy, std::span<const BlockSpec> specs,
                        const BaselineOptions& opts);

/// What compare_hv needs from a run; also the on-disk trace format.
struct RunTrace {
  std::string label;
  Strategy strategy = Strategy::Random;
  Point2 reference;
  std::vector<double> hv_trajectory;
  /// Cumulative wall time after each evaluation (empty when not timed).
  std::vector<double> cumulative_seconds;

  double final_hv() const { return hv_trajectory.empty() ? 0.0 : hv_trajectory.back(); }
};

RunTrace make_trace(const BaselineRun& run, std::string label);
RunTrace make_trace(const OptimizationResult& result, std::string label = "mobo");

struct ComparisonRow {
  std::string label;
  Strategy strategy = Strategy::Random;
  double final_hv = 0.0;
  /// (HV_mobo - HV_run) / HV_run * 100; empty when HV_run is 0.
  std::optional<double> pct_mobo_gain;
  std::size_t evaluations = 0;
  std::optional<double> total_seconds;
};

struct Comparison {
  Point2 reference;
  std::vector<ComparisonRow> rows;  ///< MOBO first, then the runs in the given order
};

/// Refuses (InvalidArgument) when any run was scored against a different r.
Comparison compare_hv(std::span<const RunTrace> runs, const RunTrace& mobo);

}  // namespace blockopt
