#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blockopt/baselines.hpp"
#include "blockopt/mobo.hpp"
#include "blockopt/validate.hpp"

namespace blockopt {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

/// One JSON object per line. Wall times are written only when `timing` is set,
/// so untimed logs are byte-identical across reruns.
void write_run_log(std::ostream& out, std::span<const IterationRecord> log, bool timing = false);
std::vector<IterationRecord> read_run_log(std::istream& in);

/// Archive rows "D1..Dn f1 f2", tab separated, sorted by f1.
void write_archive(std::ostream& out, const ParetoArchive& archive);

struct ArchiveRow {
  BlockSpec spec;
  Point2 point;
};
std::vector<ArchiveRow> read_archive(std::istream& in);

/// Specs from an archive file or from one spec per line ("38,190").
std::vector<BlockSpec> read_spec_list(std::istream& in);

void write_hv_trajectory(std::ostream& out, std::span<const double> hv);

/// One row per evaluation in order: spec, m, mu, sigma, q_hat, f1, f2, status.
void write_evaluations(std::ostream& out, std::span<const Evaluation> evaluations, Estimator estimator,
                       bool timing = false);

void write_summary(std::ostream& out, const OptimizationResult& result, bool timing = false);

/// Tables 2-4 layout: spec, n, mean/std of f1, mean/std of f2, infeasible count.
void write_validation(std::ostream& out, const ValidationReport& report);
/// Per-replication raw values and footnoted failures.
void write_validation_raw(std::ostream& out, const ValidationReport& report);

void write_trace(std::ostream& out, const RunTrace& trace, bool timing = false);
RunTrace read_trace(std::istream& in);

void write_comparison(std::ostream& out, const Comparison& comparison);
/// label, evaluation index, HV, cumulative seconds (when timed).
void write_trace_series(std::ostream& out, std::span<const RunTrace> traces);

}  // namespace blockopt
