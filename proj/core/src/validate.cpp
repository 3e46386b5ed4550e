#include "blockopt/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "blockopt/error.hpp"
#include "blockopt/parallel.hpp"

namespace blockopt {
namespace {

std::optional<double> mean_of(std::span<const double> v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> sd_of(std::span<const double> v, double mean) {
  if (v.size() < 2) return std::nullopt;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

void aggregate(ValidationRow& row) {
  row.mean_f1 = mean_of(row.f1);
  row.mean_f2 = mean_of(row.f2);
  row.std_f1 = row.mean_f1 ? sd_of(row.f1, *row.mean_f1) : std::nullopt;
  row.std_f2 = row.mean_f2 ? sd_of(row.f2, *row.mean_f2) : std::nullopt;
}

ValidationReport out_of_sample(std::span<const BlockSpec> specs, std::span<const ProblemDefinition> test_problems,
                               unsigned workers) {
  return out_of_sample(specs, test_problems.size(),
                       [&](std::size_t i) { return test_problems[i]; }, workers);
}

ValidationReport out_of_sample(std::span<const BlockSpec> specs, std::size_t count,
                               const std::function<ProblemDefinition(std::size_t)>& make_problem, unsigned workers) {
  if (specs.empty()) throw InvalidArgument("validation needs at least one spec");
  if (count == 0) throw InvalidArgument("validation needs at least one test problem");

  // results[rep][spec]
  std::vector<std::vector<Evaluation>> results(count);
  parallel_for(count, workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t rep = lo; rep < hi; ++rep) {
      const ProblemDefinition problem = make_problem(rep);
      problem.validate();
      auto& out = results[rep];
      out.reserve(specs.size());
      for (const auto& s : specs) out.push_back(evaluate(problem, s));
    }
  });

  ValidationReport report;
  report.test_problems = count;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    ValidationRow row;
    row.spec = specs[k];
    for (std::size_t rep = 0; rep < count; ++rep) {
      const Evaluation& ev = results[rep][k];
      if (ev.objectives) {
        row.replications.push_back(rep);
        row.f1.push_back(ev.objectives->f1);
        row.f2.push_back(ev.objectives->f2);
      } else {
        row.failures.push_back({rep, ev.failure});
      }
    }
    aggregate(row);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("spearman needs equally long inputs");
  if (x.size() < 2) return std::nullopt;
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace blockopt
