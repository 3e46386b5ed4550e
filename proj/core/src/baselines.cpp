#include "blockopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "blockopt/error.hpp"
#include "blockopt/parallel.hpp"
#include "blockopt/rng.hpp"

namespace blockopt {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Enumeration:
      return "enumeration";
    case Strategy::Random:
      return "random";
    case Strategy::Structured:
      return "structured";
    case Strategy::Mobo:
      return "mobo";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::Enumeration, Strategy::Random, Strategy::Structured, Strategy::Mobo}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown strategy '" + std::string(name) + "'");
}

BaselineRun score_specs(const ProblemDefinition& problem, Strategy strategy, std::span<const BlockSpec> specs,
                        const BaselineOptions& opts) {
  problem.validate();
  BaselineRun run;
  run.strategy = strategy;
  run.reference = opts.reference;
  run.archive = ParetoArchive(opts.reference);
  run.budget = specs.size();
  run.evaluations.resize(specs.size());
  parallel_for(specs.size(), opts.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      run.evaluations[i] = opts.cache ? opts.cache->evaluate(specs[i]) : evaluate(problem, specs[i]);
    }
  });
  run.hv_trajectory.reserve(specs.size() + 1);
  run.hv_trajectory.push_back(0.0);
  for (const auto& ev : run.evaluations) {
    if (ev.objectives) run.archive.insert(ev.spec, {ev.objectives->f1, ev.objectives->f2});
    run.hv_trajectory.push_back(run.archive.hypervolume());
  }
  return run;
}

EnumerationResult enumerate_all(const ProblemDefinition& problem, const BaselineOptions& opts, std::size_t cap) {
  problem.validate();
  const std::size_t total = problem.lattice_size();
  if (total > cap) {
    throw InvalidArgument("enumeration of " + std::to_string(total) + " specs exceeds the cap of " +
                          std::to_string(cap));
  }
  const auto specs = lattice_points(problem.bounds);
  EnumerationResult out;
  out.run = score_specs(problem, Strategy::Enumeration, specs, opts);
  std::vector<Point2> pts;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < out.run.evaluations.size(); ++i) {
    const auto& ev = out.run.evaluations[i];
    if (!ev.objectives) continue;
    pts.push_back({ev.objectives->f1, ev.objectives->f2});
    where.push_back(i);
  }
  for (std::size_t k : non_dominated_indices(pts)) out.front.push_back(where[k]);
  return out;
}

BaselineRun random_baseline(const ProblemDefinition& problem, std::size_t budget, std::uint64_t seed,
                            const BaselineOptions& opts) {
  problem.validate();
  if (budget < 1) throw InvalidArgument("random baseline budget must be at least 1");
  const std::size_t total = problem.lattice_size();
  if (budget > total) {
    throw InvalidArgument("budget " + std::to_string(budget) + " exceeds the lattice size " + std::to_string(total));
  }
  Rng rng(seed);
  std::set<BlockSpec> seen;
  std::vector<BlockSpec> specs;
  while (specs.size() < budget) {
    std::vector<int> c(problem.bounds.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = static_cast<int>(rng.uniform_int(1, problem.bounds[j]));
    BlockSpec s(std::move(c));
    if (seen.insert(s).second) specs.push_back(std::move(s));
  }
  return score_specs(problem, Strategy::Random, specs, opts);
}

std::vector<int> equidistant_levels(int upper, int count) {
  if (count < 1 || count > upper) {
    throw InvalidArgument("cannot place " + std::to_string(count) + " levels in [1, " + std::to_string(upper) + "]");
  }
  const int step = upper / count;
  const int start = std::max(1, std::min(2, upper - (count - 1) * step));
  std::vector<int> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + i * step;
  return out;
}

std::vector<int> structured_levels(std::span<const int> bounds, std::size_t budget) {
  if (budget < 1) throw InvalidArgument("structured grid budget must be at least 1");
  const std::size_t d = bounds.size();
  if (d == 1) return {static_cast<int>(budget)};
  const double root = std::pow(static_cast<double>(budget), 1.0 / static_cast<double>(d));
  const int lo = std::max(1, static_cast<int>(std::floor(root)) - 2);
  const int hi = static_cast<int>(std::ceil(root)) + 2;

  std::optional<std::vector<int>> best;
  std::size_t best_product = 0;
  const auto better = [&](const std::vector<int>& v, std::size_t prod) {
    if (!best) return true;
    if (prod != best_product) return prod < best_product;
    const bool v_ni = std::is_sorted(v.rbegin(), v.rend());
    const bool b_ni = std::is_sorted(best->rbegin(), best->rend());
    if (v_ni != b_ni) return v_ni;
    const int v_spread = *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
    const int b_spread = *std::max_element(best->begin(), best->end()) - *std::min_element(best->begin(), best->end());
    if (v_spread != b_spread) return v_spread < b_spread;
    return v > *best;
  };
  std::vector<int> v(d, lo);
  for (;;) {
    const int mx = *std::max_element(v.begin(), v.end());
    const int mn = *std::min_element(v.begin(), v.end());
    bool fits = mx - mn <= 2;
    std::size_t prod = 1;
    for (std::size_t j = 0; j < d; ++j) {
      if (v[j] > bounds[j]) fits = false;
      prod *= static_cast<std::size_t>(v[j]);
    }
    if (fits && prod >= budget && better(v, prod)) {
      best = v;
      best_product = prod;
    }
    std::size_t j = d;
    while (j-- > 0) {
      if (++v[j] <= hi) break;
      v[j] = lo;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  if (!best) throw InvalidArgument("budget " + std::to_string(budget) + " has no near-square grid within the bounds");
  return *best;
}

std::vector<BlockSpec> structured_points(std::span<const int> bounds, std::size_t budget,
                                         std::optional<std::vector<int>> levels) {
  if (budget < 1) throw InvalidArgument("structured grid budget must be at least 1");
  const std::size_t d = bounds.size();
  const std::vector<int> counts = levels ? *levels : structured_levels(bounds, budget);
  if (counts.size() != d) throw InvalidArgument("need one level count per decision dimension");
  std::vector<std::vector<int>> axis(d);
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) {
    axis[j] = equidistant_levels(bounds[j], counts[j]);
    total *= static_cast<std::size_t>(counts[j]);
  }
  if (total < budget) throw InvalidArgument("level grid has fewer points than the budget");

  // Grid index vectors in row-major order.
  std::vector<std::vector<int>> grid;
  grid.reserve(total);
  std::vector<int> idx(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    grid.push_back(idx);
    for (std::size_t j = d; j-- > 0;) {
      if (++idx[j] < counts[j]) break;
      idx[j] = 0;
    }
  }

  std::size_t excess = total - budget;
  std::vector<bool> dropped(total, false);
  const auto drop = [&](const std::vector<int>& target) {
    if (excess == 0) return;
    const auto it = std::find(grid.begin(), grid.end(), target);
    const auto k = static_cast<std::size_t>(it - grid.begin());
    if (!dropped[k]) {
      dropped[k] = true;
      --excess;
    }
  };
  // Corners in lexicographic order of their index vectors.
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    std::vector<int> corner(d);
    for (std::size_t j = 0; j < d; ++j) corner[j] = (mask >> (d - 1 - j)) & 1 ? counts[j] - 1 : 0;
    drop(corner);
  }
  std::vector<int> centre(d);
  for (std::size_t j = 0; j < d; ++j) centre[j] = (counts[j] - 1) / 2;
  drop(centre);
  for (std::size_t k = total; k-- > 0 && excess > 0;) {
    if (!dropped[k]) {
      dropped[k] = true;
      --excess;
    }
  }

  std::vector<BlockSpec> out;
  std::set<BlockSpec> seen;
  for (std::size_t k = 0; k < total; ++k) {
    if (dropped[k]) continue;
    std::vector<int> c(d);
    for (std::size_t j = 0; j < d; ++j) c[j] = axis[j][static_cast<std::size_t>(grid[k][j])];
    BlockSpec s(std::move(c));
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

BaselineRun structured_grid(const ProblemDefinition& problem, std::size_t budget, const BaselineOptions& opts,
                            std::optional<std::vector<int>> levels) {
  problem.validate();
  const auto specs = structured_points(problem.bounds, budget, std::move(levels));
  return score_specs(problem, Strategy::Structured, specs, opts);
}

RunTrace make_trace(const BaselineRun& run, std::string label) {
  RunTrace t;
  t.label = std::move(label);
  t.strategy = run.strategy;
  t.reference = run.reference;
  t.hv_trajectory = run.hv_trajectory;
  double acc = 0.0;
  for (const auto& ev : run.evaluations) {
    acc += ev.wall_seconds;
    t.cumulative_seconds.push_back(acc);
  }
  return t;
}

RunTrace make_trace(const OptimizationResult& result, std::string label) {
  RunTrace t;
  t.label = std::move(label);
  t.strategy = Strategy::Mobo;
  t.reference = result.reference;
  // Indexed by evaluation like the baselines, placement steps included.
  t.hv_trajectory.push_back(0.0);
  double acc = 0.0;
  for (const auto& rec : result.log) {
    t.hv_trajectory.push_back(rec.hv);
    acc += rec.wall_seconds;
    t.cumulative_seconds.push_back(acc);
  }
  return t;
}

Comparison compare_hv(std::span<const RunTrace> runs, const RunTrace& mobo) {
  Comparison out;
  out.reference = mobo.reference;
  const auto row_of = [&](const RunTrace& r) {
    if (!(r.reference == mobo.reference)) {
      throw InvalidArgument("run '" + r.label + "' was scored against a different reference point");
    }
    ComparisonRow row;
    row.label = r.label;
    row.strategy = r.strategy;
    row.final_hv = r.final_hv();
    row.evaluations = r.hv_trajectory.empty() ? 0 : r.hv_trajectory.size() - 1;
    if (r.final_hv() > 0.0) row.pct_mobo_gain = (mobo.final_hv() - r.final_hv()) / r.final_hv() * 100.0;
    if (!r.cumulative_seconds.empty()) row.total_seconds = r.cumulative_seconds.back();
    return row;
  };
  out.rows.push_back(row_of(mobo));
  for (const auto& r : runs) out.rows.push_back(row_of(r));
  return out;
}

}  // namespace blockopt
