#include "blockopt/mobo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "blockopt/error.hpp"
#include "blockopt/parallel.hpp"
#include "blockopt/rng.hpp"

namespace blockopt {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

BlockSpec spec_from_index(std::size_t index, std::span<const int> bounds) {
  std::vector<int> c(bounds.size());
  for (std::size_t j = bounds.size(); j-- > 0;) {
    const auto u = static_cast<std::size_t>(bounds[j]);
    c[j] = static_cast<int>(index % u) + 1;
    index /= u;
  }
  return BlockSpec(std::move(c));
}

std::size_t lattice_size(std::span<const int> bounds) {
  std::size_t n = 1;
  for (int u : bounds) n *= static_cast<std::size_t>(u);
  return n;
}

ModelSummary summarize(const GPModel& m) {
  return {m.hyperparameters(), m.log_marginal_likelihood(), m.degenerate()};
}

// Random subset of the lattice plus neighbours of the archive solutions, sorted.
std::vector<BlockSpec> random_pool(std::span<const int> bounds, const OptimizerConfig& config,
                                   std::span<const BlockSpec> archive, std::uint64_t seed) {
  const std::size_t total = lattice_size(bounds);
  const std::size_t want = std::min(config.random_pool_size, total);
  Rng rng(seed);
  std::unordered_set<std::size_t> picked;
  while (picked.size() < want) {
    picked.insert(static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(total) - 1)));
  }
  std::set<BlockSpec> pool;
  for (std::size_t idx : picked) pool.insert(spec_from_index(idx, bounds));
  for (const auto& s : archive) {
    for (auto& nb : lattice_neighbors(s, bounds, config.neighbor_count)) pool.insert(std::move(nb));
  }
  return {pool.begin(), pool.end()};
}

}  // namespace

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Initial:
      return "initial";
    case Phase::ReferencePlacement:
      return "reference-placement";
    case Phase::Optimization:
      return "optimization";
    case Phase::Converged:
      return "converged";
    case Phase::BudgetExhausted:
      return "budget-exhausted";
  }
  return "unknown";
}

Phase parse_phase(std::string_view name) {
  for (Phase p : {Phase::Initial, Phase::ReferencePlacement, Phase::Optimization, Phase::Converged,
                  Phase::BudgetExhausted}) {
    if (to_string(p) == name) return p;
  }
  throw InvalidArgument("unknown phase '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
  if (init_points < 2) throw InvalidArgument("init_points (k) must be at least 2");
  if (window < 1) throw InvalidArgument("window (N) must be at least 1");
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance (epsilon) must be positive");
  if (!(growth_factor > 0.0 && growth_factor <= 1.0)) throw InvalidArgument("growth_factor (beta) must lie in (0, 1]");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
  if (random_pool_size < 1) throw InvalidArgument("random_pool_size must be at least 1");
}

Point2 update_reference_point(const Point2& r, const ObjectivePair& cand, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("growth factor must lie in (0, 1]");
  const double step = beta * std::min(cand.f1, cand.f2);
  return {r.f1 + step, r.f2 + step};
}

ConvergenceCheck check_convergence(std::span<const double> hv_trajectory, std::size_t window, double tolerance) {
  if (window < 1) throw InvalidArgument("window must be at least 1");
  ConvergenceCheck out;
  if (hv_trajectory.size() < window + 2) return out;
  const std::size_t t = hv_trajectory.size() - 1;
  double sum = 0.0;
  for (std::size_t a = t - window + 1; a <= t; ++a) sum += std::abs(hv_trajectory[a] - hv_trajectory[a - 1]);
  out.c_eps = sum / static_cast<double>(window);
  out.stop = *out.c_eps <= tolerance;
  return out;
}

Selection select_candidate(const AcquisitionContext& ctx, std::span<const BlockSpec> pool,
                           const std::set<BlockSpec>& exclusions, std::span<const int> bounds, unsigned workers) {
  std::vector<const BlockSpec*> open;
  open.reserve(pool.size());
  for (const auto& s : pool) {
    if (!exclusions.contains(s)) open.push_back(&s);
  }
  if (open.empty()) throw InvalidArgument("candidate pool is empty after exclusions");

  std::vector<double> values(open.size());
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (open.size() + kBlock - 1) / kBlock;
  parallel_for(blocks, workers, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t lo = b * kBlock;
      const std::size_t hi = std::min(open.size(), lo + kBlock);
      Eigen::MatrixXd Q(static_cast<Eigen::Index>(hi - lo), static_cast<Eigen::Index>(bounds.size()));
      for (std::size_t i = lo; i < hi; ++i) Q.row(static_cast<Eigen::Index>(i - lo)) = normalize_spec(*open[i], bounds);
      const auto v = ehvi_batch(ctx, Q);
      std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(lo));
    }
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < open.size(); ++i) {
    if (values[i] > values[best] || (values[i] == values[best] && *open[i] < *open[best])) best = i;
  }
  Selection sel;
  sel.spec = *open[best];
  sel.ehvi = values[best];
  sel.exploration_fallback = !(values[best] > 0.0);
  return sel;
}

std::vector<BlockSpec> lattice_points(std::span<const int> bounds) {
  const std::size_t n = lattice_size(bounds);
  std::vector<BlockSpec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(spec_from_index(i, bounds));
  return out;
}

std::vector<BlockSpec> lattice_neighbors(const BlockSpec& center, std::span<const int> bounds, std::size_t count) {
  if (center.size() != bounds.size()) throw InvalidArgument("block spec rank does not match the bounds");
  const std::size_t d = bounds.size();
  const std::size_t available = lattice_size(bounds) - 1;
  const std::size_t want = std::min(count, available);
  int max_span = 0;
  for (int u : bounds) max_span = std::max(max_span, u);
  // Grow a box until it holds `want` points inside the inscribed ball; those
  // are then exactly the nearest ones.
  for (int radius = 1;; ++radius) {
    std::vector<std::pair<long, BlockSpec>> found;
    std::vector<int> off(d, -radius);
    for (;;) {
      long d2 = 0;
      std::vector<int> c(d);
      bool inside = true;
      for (std::size_t j = 0; j < d; ++j) {
        c[j] = center[j] + off[j];
        if (c[j] < 1 || c[j] > bounds[j]) inside = false;
        d2 += static_cast<long>(off[j]) * off[j];
      }
      if (inside && d2 > 0 && d2 <= static_cast<long>(radius) * radius) found.emplace_back(d2, BlockSpec(std::move(c)));
      std::size_t j = d;
      while (j-- > 0) {
        if (++off[j] <= radius) break;
        off[j] = -radius;
      }
      if (j == static_cast<std::size_t>(-1)) break;
    }
    if (found.size() >= want || radius > max_span * 2) {
      std::sort(found.begin(), found.end());
      std::vector<BlockSpec> out;
      for (std::size_t i = 0; i < std::min(want, found.size()); ++i) out.push_back(std::move(found[i].second));
      return out;
    }
  }
}

std::vector<BlockSpec> initial_design(std::span<const int> bounds, std::size_t k, std::uint64_t seed) {
  const std::size_t total = lattice_size(bounds);
  const std::size_t want = std::min(k, total);
  ScrambledHalton seq(bounds.size(), mix_seed(seed, 1));
  std::vector<BlockSpec> out;
  std::set<BlockSpec> seen;
  // Collisions redraw; after many draws fall back to a lexicographic fill.
  for (std::size_t draws = 0; out.size() < want && draws < 1000 * want; ++draws) {
    const auto u = seq.next();
    std::vector<int> c(bounds.size());
    for (std::size_t j = 0; j < bounds.size(); ++j) {
      c[j] = std::min(bounds[j], 1 + static_cast<int>(std::floor(u[j] * bounds[j])));
    }
    BlockSpec s(std::move(c));
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  for (std::size_t i = 0; out.size() < want; ++i) {
    BlockSpec s = spec_from_index(i, bounds);
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

ParetoArchive replay_archive(std::span<const IterationRecord> log, const Point2& reference) {
  ParetoArchive archive(reference);
  for (const auto& rec : log) {
    if (rec.phase != Phase::Optimization || !rec.objectives) continue;
    archive.insert(rec.spec, {rec.objectives->f1, rec.objectives->f2});
  }
  return archive;
}

OptimizationResult run(const ProblemDefinition& problem, const OptimizerConfig& config, ObjectiveCache* cache) {
  problem.validate();
  config.validate();
  const std::span<const int> bounds = problem.bounds;
  const std::size_t total = problem.lattice_size();

  const auto score = [&](const BlockSpec& s) { return cache ? cache->evaluate(s) : evaluate(problem, s); };

  OptimizationResult res;
  std::set<BlockSpec> evaluated;
  std::vector<BlockSpec> train_x;
  std::vector<double> train_f1, train_f2;
  Phase phase = Phase::ReferencePlacement;
  std::size_t t = 0;

  const auto record = [&](IterationRecord rec, const Evaluation& ev) {
    rec.step = res.log.size() + 1;
    rec.spec = ev.spec;
    rec.objectives = ev.objectives;
    rec.failure = ev.failure;
    rec.wall_seconds = ev.wall_seconds;
    evaluated.insert(ev.spec);
    if (ev.objectives) {
      train_x.push_back(ev.spec);
      train_f1.push_back(ev.objectives->f1);
      train_f2.push_back(ev.objectives->f2);
    }
    res.log.push_back(std::move(rec));
  };

  const auto fail = [&](const std::string& why) {
    res.reference = res.archive.reference();
    res.stop_reason = why;
    throw OptimizationFailure(why, res);
  };

  // Initial design; extra space-filling points are drawn until two feasible
  // evaluations exist.
  auto start = Clock::now();
  {
    std::vector<BlockSpec> design = initial_design(bounds, config.init_points, config.seed);
    std::size_t drawn = design.size();
    std::size_t next = 0;
    while (next < design.size() || (train_x.size() < 2 && evaluated.size() < total)) {
      if (next == design.size()) {
        drawn = std::min(total, drawn + config.init_points);
        design = initial_design(bounds, drawn, config.seed);
        if (next == design.size()) break;
      }
      const BlockSpec s = design[next++];
      if (evaluated.contains(s)) continue;
      IterationRecord rec;
      rec.phase = Phase::Initial;
      rec.reference = res.archive.reference();
      record(std::move(rec), score(s));
    }
  }
  res.wall.initial = seconds_since(start);
  if (train_x.size() < 2) fail("fewer than two feasible evaluations; all candidates infeasible");

  std::vector<BlockSpec> lattice;
  const bool full = config.pool == PoolMode::FullLattice ||
                    (config.pool == PoolMode::Auto && total <= config.full_lattice_limit);
  if (full) lattice = lattice_points(bounds);

  res.hv_trajectory.clear();
  while (true) {
    if (res.iterations >= config.max_iterations) {
      res.stop = Phase::BudgetExhausted;
      res.stop_reason = "reached max_iterations (" + std::to_string(config.max_iterations) + ")";
      break;
    }
    if (evaluated.size() >= total) {
      res.stop = Phase::BudgetExhausted;
      res.stop_reason = "every lattice point has been evaluated";
      break;
    }
    start = Clock::now();
    const std::size_t iter = res.iterations + 1;

    GPOptions gopt = config.gp;
    std::optional<GPModel> m1, m2;
    try {
      gopt.seed = mix_seed(config.seed, 2 * iter);
      m1.emplace(GPModel::fit(train_x, train_f1, bounds, gopt));
      gopt.seed = mix_seed(config.seed, 2 * iter + 1);
      m2.emplace(GPModel::fit(train_x, train_f2, bounds, gopt));
    } catch (const Error& e) {
      fail("surrogate fit failed at iteration " + std::to_string(iter) + ": " + e.what());
    }

    const AcquisitionContext ctx(*m1, *m2, res.archive.points(), res.archive.reference());
    const std::vector<BlockSpec> pool =
        full ? std::vector<BlockSpec>{}
             : random_pool(bounds, config, res.archive.solutions(), mix_seed(config.seed, 0x9000 + iter));
    const Selection sel = select_candidate(ctx, full ? std::span<const BlockSpec>(lattice) : pool, evaluated, bounds,
                                           config.workers);

    const Evaluation ev = score(sel.spec);
    ++res.iterations;

    IterationRecord rec;
    rec.max_ehvi = sel.ehvi;
    rec.exploration_fallback = sel.exploration_fallback;
    rec.model_f1 = summarize(*m1);
    rec.model_f2 = summarize(*m2);

    bool converged = false;
    if (phase == Phase::ReferencePlacement) {
      rec.reference = res.archive.reference();
      if (ev.objectives) {
        const Point2 f{ev.objectives->f1, ev.objectives->f2};
        const double gain = hvi({}, res.archive.reference(), f);
        if (gain > 0.0) {
          // First insertion freezes r and opens the optimization phase.
          phase = Phase::Optimization;
          t = 1;
          const InsertReport ins = res.archive.insert(ev.spec, f);
          rec.hvi = ins.hvi;
          rec.inserted = ins.added;
          res.hv_trajectory = {0.0, res.archive.hypervolume()};
        } else {
          res.archive.set_reference(update_reference_point(res.archive.reference(), *ev.objectives,
                                                           config.growth_factor));
          t = 1;
        }
      } else {
        ++t;
      }
      rec.phase = phase;
      rec.t = t;
      rec.hv = res.archive.hypervolume();
      if (phase == Phase::Optimization) {
        const auto check = check_convergence(res.hv_trajectory, config.window, config.tolerance);
        rec.c_eps = check.c_eps;
        converged = check.stop;
      }
      record(std::move(rec), ev);
      res.log.back().wall_seconds = seconds_since(start);
      res.wall.placement += res.log.back().wall_seconds;
    } else {
      ++t;
      rec.phase = Phase::Optimization;
      rec.t = t;
      rec.reference = res.archive.reference();
      if (ev.objectives) {
        const InsertReport ins = res.archive.insert(ev.spec, {ev.objectives->f1, ev.objectives->f2});
        rec.hvi = ins.hvi;
        rec.inserted = ins.added;
      }
      res.hv_trajectory.push_back(res.archive.hypervolume());
      rec.hv = res.hv_trajectory.back();
      const auto check = check_convergence(res.hv_trajectory, config.window, config.tolerance);
      rec.c_eps = check.c_eps;
      converged = check.stop;
      record(std::move(rec), ev);
      res.log.back().wall_seconds = seconds_since(start);
      res.wall.optimization += res.log.back().wall_seconds;
    }
    if (converged) {
      res.stop = Phase::Converged;
      res.stop_reason = "moving-average HV increment fell to or below tolerance";
      break;
    }
  }
  res.reference = res.archive.reference();
  return res;
}

}  // namespace blockopt
