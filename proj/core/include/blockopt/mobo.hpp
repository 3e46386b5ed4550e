#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blockopt/ehvi.hpp"
#include "blockopt/gp.hpp"
#include "blockopt/objectives.hpp"
#include "blockopt/pareto.hpp"

namespace blockopt {

enum class Phase { Initial, ReferencePlacement, Optimization, Converged, BudgetExhausted };

std::string_view to_string(Phase p);
Phase parse_phase(std::string_view name);

enum class PoolMode {
  Auto,          ///< full lattice up to full_lattice_limit, random subset beyond
  FullLattice,
  RandomSubset,
};

struct OptimizerConfig {
  std::size_t init_points = 5;       ///< k
  std::size_t window = 10;           ///< N
  double tolerance = 1e-5;           ///< epsilon
  double growth_factor = 0.5;        ///< beta
  std::size_t max_iterations = 500;  ///< acquisition iterations, initial design excluded
  std::uint64_t seed = 0;
  PoolMode pool = PoolMode::Auto;
  std::size_t full_lattice_limit = 200000;
  std::size_t random_pool_size = 200000;
  std::size_t neighbor_count = 50;
  GPOptions gp;  ///< its seed is replaced per iteration
  unsigned workers = 1;

  void validate() const;
};

struct ModelSummary {
  GPHyperparameters hyper;
  double log_marginal_likelihood = 0.0;
  bool degenerate = false;
};

/// One evaluated spec. `step` counts every evaluation from 1; `t` is the
/// phase-local counter that restarts at 1 on every reference update.
struct IterationRecord {
  std::size_t step = 0;
  std::size_t t = 0;
  Phase phase = Phase::Initial;
  Point2 reference;
  BlockSpec spec;
  std::optional<ObjectivePair> objectives;
  std::string failure;
  double hvi = 0.0;
  bool inserted = false;
  double hv = 0.0;
  std::optional<double> c_eps;
  std::optional<double> max_ehvi;
  bool exploration_fallback = false;
  std::optional<ModelSummary> model_f1;
  std::optional<ModelSummary> model_f2;
  double wall_seconds = 0.0;
};

struct PhaseTimes {
  double initial = 0.0;
  double placement = 0.0;
  double optimization = 0.0;
};

struct OptimizationResult {
  ParetoArchive archive;
  Point2 reference;
  /// HV_0 = 0 followed by HV after each optimization-phase iteration.
  std::vector<double> hv_trajectory;
  std::vector<IterationRecord> log;
  std::size_t iterations = 0;  ///< acquisition iterations
  Phase stop = Phase::BudgetExhausted;
  std::string stop_reason;
  PhaseTimes wall;
};

/// Raised when the loop cannot continue; carries the state reached so far.
class OptimizationFailure : public NumericError {
 public:
  OptimizationFailure(const std::string& what, OptimizationResult snapshot)
      : NumericError(what), snapshot_(std::move(snapshot)) {}
  const OptimizationResult& snapshot() const { return snapshot_; }

 private:
  OptimizationResult snapshot_;
};

/// r + beta * min(f1, f2) in both coordinates.
Point2 update_reference_point(const Point2& r, const ObjectivePair& cand, double beta);

struct ConvergenceCheck {
  std::optional<double> c_eps;
  bool stop = false;
};

/// Mean absolute increment over the last N steps of [HV_0, ..., HV_t];
/// undefined while t <= N.
ConvergenceCheck check_convergence(std::span<const double> hv_trajectory, std::size_t window, double tolerance);

struct Selection {
  BlockSpec spec;
  double ehvi = 0.0;
  bool exploration_fallback = false;  ///< every EHVI was zero
};

/// Pool member (not in `exclusions`) with the largest EHVI; ties go to the
/// lexicographically smallest spec. Throws InvalidArgument on an empty pool.
Selection select_candidate(const AcquisitionContext& ctx, std::span<const BlockSpec> pool,
                           const std::set<BlockSpec>& exclusions, std::span<const int> bounds, unsigned workers = 1);

/// Every decision of the box, in lexicographic order.
std::vector<BlockSpec> lattice_points(std::span<const int> bounds);

/// Up to `count` nearest lattice points of `center` (Euclidean in index
/// space, ties lexicographic), excluding the center itself.
std::vector<BlockSpec> lattice_neighbors(const BlockSpec& center, std::span<const int> bounds, std::size_t count);

/// k distinct space-filling specs: scrambled Halton points mapped to the lattice.
std::vector<BlockSpec> initial_design(std::span<const int> bounds, std::size_t k, std::uint64_t seed);

/// Runs the optimizer. Evaluations go through `cache` when one is given.
OptimizationResult run(const ProblemDefinition& problem, const OptimizerConfig& config,
                       ObjectiveCache* cache = nullptr);

/// Rebuilds the archive by inserting optimization-phase evaluations in log order.
ParetoArchive replay_archive(std::span<const IterationRecord> log, const Point2& reference);

}  // namespace blockopt
