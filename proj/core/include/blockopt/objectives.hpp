#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "blockopt/error.hpp"
#include "blockopt/grid.hpp"
#include "blockopt/gumbel.hpp"

namespace blockopt {

/// Integer decision vector (D_1..D_n): block counts per dimension, or the
/// single tied count of a coupled problem. Ordered lexicographically.
struct BlockSpec {
  std::vector<int> counts;

  BlockSpec() = default;
  BlockSpec(std::initializer_list<int> c) : counts(c) {}
  explicit BlockSpec(std::vector<int> c) : counts(std::move(c)) {}

  std::size_t size() const { return counts.size(); }
  int operator[](std::size_t j) const { return counts[j]; }

  /// m, the number of blocks.
  std::size_t block_count() const;

  friend auto operator<=>(const BlockSpec&, const BlockSpec&) = default;
  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

/// "(38,190)"
std::string to_string(const BlockSpec& spec);
/// Parses "38,190", "(38,190)" or "38 190".
BlockSpec parse_block_spec(const std::string& text);

/// Raised for specs that cannot be scored (m below the floor, degenerate
/// maxima, solver failure, q == 0).
class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

struct ProblemDefinition {
  std::shared_ptr<const GriddedDomain> fit_domain;
  /// q: the observed most extreme value of the reference region.
  double reference_extreme_q = 0.0;
  /// U_j for each decision variable.
  std::vector<int> bounds;
  std::size_t block_count_floor = 2;
  Estimator estimator = Estimator::MAP;
  /// Optional linear tying: the decision is a single D_1 and dimension j
  /// receives coupling[j] * D_1 blocks.
  std::optional<std::vector<int>> coupling;
  SolverOptions solver;

  /// Throws InvalidArgument on any broken invariant.
  void validate() const;

  std::size_t decision_dims() const { return bounds.size(); }
  bool contains(const BlockSpec& decision) const;
  /// Per-dimension block counts for a decision (identity when uncoupled).
  BlockSpec block_counts(const BlockSpec& decision) const;
  /// Number of points of the decision lattice, prod(U_j).
  std::size_t lattice_size() const;
};

/// Expands a 1-parameter decision through the configured coupling.
BlockSpec coupled_to_full_spec(const ProblemDefinition& problem, int d1);

struct ObjectivePair {
  double f1 = 0.0;  ///< |(q - q_hat) / q|
  double f2 = 0.0;  ///< KS distance of the fitted Gumbel
  GumbelParams params;
  std::size_t block_count = 0;
  double q_hat = 0.0;
  int solver_iterations = 0;

  friend bool operator==(const ObjectivePair&, const ObjectivePair&) = default;
};

/// Outcome of scoring one decision; `objectives` is empty for infeasible specs.
struct Evaluation {
  BlockSpec spec;
  std::optional<ObjectivePair> objectives;
  std::string failure;
  double wall_seconds = 0.0;

  bool feasible() const { return objectives.has_value(); }
};

/// Boundaries round(k L / D), k = 0..D. Requires 1 <= D <= L.
std::vector<std::size_t> partition_boundaries(std::size_t length, std::size_t parts);

/// Per-block maxima for full per-dimension counts, row-major over block indices.
MaximaSample extract_block_maxima(const GriddedDomain& domain, const BlockSpec& counts);

/// Scores a decision; throws InfeasibleSpec when it cannot be scored.
ObjectivePair eval_objectives(const ProblemDefinition& problem, const BlockSpec& decision);

/// Non-throwing wrapper around eval_objectives that also records wall time.
Evaluation evaluate(const ProblemDefinition& problem, const BlockSpec& decision);

/// Memoizing, thread-safe front end to `evaluate` for one problem. Concurrent
/// callers may race on the same key; the first stored result wins, so every
/// caller observes the same value.
class ObjectiveCache {
 public:
  explicit ObjectiveCache(const ProblemDefinition& problem) : problem_(problem) {}

  Evaluation evaluate(const BlockSpec& decision);
  std::optional<Evaluation> find(const BlockSpec& decision) const;
  std::size_t size() const;
  const ProblemDefinition& problem() const { return problem_; }

 private:
  const ProblemDefinition& problem_;
  mutable std::shared_mutex mutex_;
  std::map<BlockSpec, Evaluation> entries_;
};

}  // namespace blockopt
