#include "blockopt/objectives.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace blockopt {

std::size_t BlockSpec::block_count() const {
  std::size_t m = 1;
  for (int c : counts) m *= static_cast<std::size_t>(c);
  return m;
}

std::string to_string(const BlockSpec& spec) {
  std::string s = "(";
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (j) s += ',';
    s += std::to_string(spec[j]);
  }
  return s + ")";
}

BlockSpec parse_block_spec(const std::string& text) {
  std::string cleaned;
  for (char c : text) cleaned += (c == '(' || c == ')' || c == ',' || c == 'x') ? ' ' : c;
  std::istringstream in(cleaned);
  std::vector<int> counts;
  std::string tok;
  while (in >> tok) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size()) throw InvalidArgument("malformed block spec '" + text + "'");
    counts.push_back(v);
  }
  if (counts.empty()) throw InvalidArgument("empty block spec");
  const auto last = text.find_last_not_of(" \t)");
  if (last != std::string::npos && (text[last] == ',' || text[last] == 'x')) {
    throw InvalidArgument("malformed block spec '" + text + "'");
  }
  return BlockSpec(std::move(counts));
}

void ProblemDefinition::validate() const {
  if (!fit_domain) throw InvalidArgument("problem has no fit domain");
  const auto& shape = fit_domain->shape();
  if (!std::isfinite(reference_extreme_q)) throw InvalidArgument("reference extreme q must be finite");
  if (block_count_floor < 2) throw InvalidArgument("block_count_floor must be at least 2");
  if (coupling) {
    if (bounds.size() != 1) throw InvalidArgument("a coupled problem has exactly one decision bound");
    if (coupling->size() != shape.size()) {
      throw InvalidArgument("coupling needs one factor per domain dimension");
    }
    for (std::size_t j = 0; j < shape.size(); ++j) {
      const int c = (*coupling)[j];
      if (c < 1) throw InvalidArgument("coupling factors must be positive");
      if (bounds[0] < 1 || static_cast<std::size_t>(bounds[0]) * static_cast<std::size_t>(c) > shape[j]) {
        throw InvalidArgument("bound " + std::to_string(bounds[0]) + " x coupling " + std::to_string(c) +
                              " exceeds length " + std::to_string(shape[j]) + " of dimension " +
                              std::to_string(j));
      }
    }
    return;
  }
  if (bounds.size() != shape.size()) {
    throw InvalidArgument("need one bound per domain dimension (" + std::to_string(shape.size()) + ")");
  }
  for (std::size_t j = 0; j < shape.size(); ++j) {
    if (bounds[j] < 1 || static_cast<std::size_t>(bounds[j]) > shape[j]) {
      throw InvalidArgument("bound U_" + std::to_string(j + 1) + " = " + std::to_string(bounds[j]) +
                            " must lie in [1, " + std::to_string(shape[j]) + "]");
    }
  }
}

bool ProblemDefinition::contains(const BlockSpec& decision) const {
  if (decision.size() != bounds.size()) return false;
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    if (decision[j] < 1 || decision[j] > bounds[j]) return false;
  }
  return true;
}

BlockSpec ProblemDefinition::block_counts(const BlockSpec& decision) const {
  if (!contains(decision)) {
    throw InvalidArgument("block spec " + to_string(decision) + " outside the problem bounds");
  }
  if (!coupling) return decision;
  return coupled_to_full_spec(*this, decision[0]);
}

std::size_t ProblemDefinition::lattice_size() const {
  std::size_t n = 1;
  for (int u : bounds) n *= static_cast<std::size_t>(u);
  return n;
}

BlockSpec coupled_to_full_spec(const ProblemDefinition& problem, int d1) {
  if (!problem.coupling) throw InvalidArgument("problem has no coupling configured");
  std::vector<int> counts;
  for (int c : *problem.coupling) counts.push_back(c * d1);
  return BlockSpec(std::move(counts));
}

std::vector<std::size_t> partition_boundaries(std::size_t length, std::size_t parts) {
  if (parts < 1 || parts > length) {
    throw InvalidArgument("cannot split length " + std::to_string(length) + " into " + std::to_string(parts) +
                          " blocks");
  }
  std::vector<std::size_t> b(parts + 1);
  for (std::size_t k = 0; k <= parts; ++k) b[k] = (2 * k * length + parts) / (2 * parts);
  return b;
}

MaximaSample extract_block_maxima(const GriddedDomain& domain, const BlockSpec& counts) {
  const auto& shape = domain.shape();
  const std::size_t n = shape.size();
  if (counts.size() != n) {
    throw InvalidArgument("block spec " + to_string(counts) + " does not match domain rank " + std::to_string(n));
  }
  // block_of[j][i]: block index along dimension j of lattice index i.
  std::vector<std::vector<std::size_t>> block_of(n);
  std::vector<std::size_t> block_stride(n, 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (counts[j] < 1) throw InvalidArgument("block counts must be positive");
    const auto b = partition_boundaries(shape[j], static_cast<std::size_t>(counts[j]));
    block_of[j].resize(shape[j]);
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
      std::fill(block_of[j].begin() + static_cast<std::ptrdiff_t>(b[k]),
                block_of[j].begin() + static_cast<std::ptrdiff_t>(b[k + 1]), k);
    }
  }
  for (std::size_t j = n - 1; j-- > 0;) block_stride[j] = block_stride[j + 1] * static_cast<std::size_t>(counts[j + 1]);

  std::vector<double> maxima(counts.block_count(), -std::numeric_limits<double>::infinity());
  const auto values = domain.values();
  const std::size_t row = shape[n - 1];
  const auto& last = block_of[n - 1];
  std::vector<std::size_t> idx(n, 0);
  const std::size_t rows = values.size() / row;
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t base = 0;
    for (std::size_t j = 0; j + 1 < n; ++j) base += block_of[j][idx[j]] * block_stride[j];
    const double* src = values.data() + r * row;
    for (std::size_t i = 0; i < row; ++i) {
      double& slot = maxima[base + last[i]];
      if (src[i] > slot) slot = src[i];
    }
    for (std::size_t j = n - 1; j-- > 0;) {
      if (++idx[j] < shape[j]) break;
      idx[j] = 0;
    }
  }
  return MaximaSample(std::move(maxima));
}

ObjectivePair eval_objectives(const ProblemDefinition& problem, const BlockSpec& decision) {
  if (!problem.contains(decision)) {
    throw InfeasibleSpec("block spec " + to_string(decision) + " outside the problem bounds");
  }
  const BlockSpec counts = problem.block_counts(decision);
  const std::size_t m = counts.block_count();
  if (m < problem.block_count_floor) {
    throw InfeasibleSpec("m = " + std::to_string(m) + " blocks is below the floor of " +
                         std::to_string(problem.block_count_floor));
  }
  const double q = problem.reference_extreme_q;
  if (q == 0.0) throw InfeasibleSpec("reference extreme q is zero; relative error undefined");

  const MaximaSample sample = extract_block_maxima(*problem.fit_domain, counts);
  FitReport report;
  try {
    report = fit(sample, problem.estimator, problem.solver);
  } catch (const NumericError& e) {
    throw InfeasibleSpec(std::string("estimation failed: ") + e.what());
  }
  if (!report.converged) {
    throw InfeasibleSpec("Gumbel " + std::string(to_string(problem.estimator)) + " fit did not converge after " +
                         std::to_string(report.iterations) + " iterations");
  }

  ObjectivePair out;
  out.params = report.params;
  out.block_count = m;
  out.solver_iterations = report.iterations;
  out.q_hat = return_level(report.params, static_cast<double>(m));
  out.f1 = std::abs((q - out.q_hat) / q);
  out.f2 = ks_statistic(sample, report.params);
  if (!std::isfinite(out.f1)) throw InfeasibleSpec("prediction error is not finite");
  return out;
}

Evaluation evaluate(const ProblemDefinition& problem, const BlockSpec& decision) {
  const auto start = std::chrono::steady_clock::now();
  Evaluation ev;
  ev.spec = decision;
  try {
    ev.objectives = eval_objectives(problem, decision);
  } catch (const InfeasibleSpec& e) {
    ev.failure = e.what();
  }
  ev.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ev;
}

Evaluation ObjectiveCache::evaluate(const BlockSpec& decision) {
  if (auto hit = find(decision)) return *hit;
  Evaluation ev = blockopt::evaluate(problem_, decision);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.emplace(decision, std::move(ev));
  return it->second;
}

std::optional<Evaluation> ObjectiveCache::find(const BlockSpec& decision) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(decision);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t ObjectiveCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

}  // namespace blockopt
