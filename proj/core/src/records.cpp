#include "blockopt/records.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "blockopt/error.hpp"

namespace blockopt {
namespace {

using nlohmann::json;

json spec_json(const BlockSpec& s) { return s.counts; }

json point_json(const Point2& p) { return json::array({p.f1, p.f2}); }

Point2 point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json model_json(const ModelSummary& m) {
  return {{"length_scales", m.hyper.length_scales},
          {"signal_variance", m.hyper.signal_variance},
          {"noise_variance", m.hyper.noise_variance},
          {"log_marginal_likelihood", m.log_marginal_likelihood},
          {"degenerate", m.degenerate}};
}

ModelSummary model_from(const json& j) {
  ModelSummary m;
  m.hyper.length_scales = j.at("length_scales").get<std::vector<double>>();
  m.hyper.signal_variance = j.at("signal_variance").get<double>();
  m.hyper.noise_variance = j.at("noise_variance").get<double>();
  m.log_marginal_likelihood = j.at("log_marginal_likelihood").get<double>();
  m.degenerate = j.at("degenerate").get<bool>();
  return m;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, '\t')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("malformed number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("malformed integer '" + s + "'");
  return v;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

void spec_header(std::ostream& out, std::size_t dims) {
  for (std::size_t j = 0; j < dims; ++j) out << 'D' << (j + 1) << '\t';
}

void spec_cells(std::ostream& out, const BlockSpec& s) {
  for (int c : s.counts) out << c << '\t';
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_run_log(std::ostream& out, std::span<const IterationRecord> log, bool timing) {
  for (const auto& r : log) {
    json j;
    j["step"] = r.step;
    j["t"] = r.t;
    j["phase"] = std::string(to_string(r.phase));
    j["reference"] = point_json(r.reference);
    j["spec"] = spec_json(r.spec);
    if (r.objectives) {
      const auto& o = *r.objectives;
      j["f1"] = o.f1;
      j["f2"] = o.f2;
      j["m"] = o.block_count;
      j["mu"] = o.params.mu;
      j["sigma"] = o.params.sigma;
      j["q_hat"] = o.q_hat;
      j["solver_iterations"] = o.solver_iterations;
    } else {
      j["failure"] = r.failure;
    }
    j["hvi"] = r.hvi;
    j["inserted"] = r.inserted;
    j["hv"] = r.hv;
    j["c_eps"] = optional_json(r.c_eps);
    j["max_ehvi"] = optional_json(r.max_ehvi);
    j["exploration_fallback"] = r.exploration_fallback;
    if (r.model_f1) j["gp_f1"] = model_json(*r.model_f1);
    if (r.model_f2) j["gp_f2"] = model_json(*r.model_f2);
    if (timing) j["wall_seconds"] = r.wall_seconds;
    out << j.dump() << '\n';
  }
}

std::vector<IterationRecord> read_run_log(std::istream& in) {
  std::vector<IterationRecord> log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      IterationRecord r;
      r.step = j.at("step").get<std::size_t>();
      r.t = j.at("t").get<std::size_t>();
      r.phase = parse_phase(j.at("phase").get<std::string>());
      r.reference = point_from(j.at("reference"));
      r.spec = BlockSpec(j.at("spec").get<std::vector<int>>());
      if (j.contains("f1")) {
        ObjectivePair o;
        o.f1 = j.at("f1").get<double>();
        o.f2 = j.at("f2").get<double>();
        o.block_count = j.at("m").get<std::size_t>();
        o.params = {j.at("mu").get<double>(), j.at("sigma").get<double>()};
        o.q_hat = j.at("q_hat").get<double>();
        o.solver_iterations = j.at("solver_iterations").get<int>();
        r.objectives = o;
      } else {
        r.failure = j.at("failure").get<std::string>();
      }
      r.hvi = j.at("hvi").get<double>();
      r.inserted = j.at("inserted").get<bool>();
      r.hv = j.at("hv").get<double>();
      if (!j.at("c_eps").is_null()) r.c_eps = j.at("c_eps").get<double>();
      if (!j.at("max_ehvi").is_null()) r.max_ehvi = j.at("max_ehvi").get<double>();
      r.exploration_fallback = j.at("exploration_fallback").get<bool>();
      if (j.contains("gp_f1")) r.model_f1 = model_from(j.at("gp_f1"));
      if (j.contains("gp_f2")) r.model_f2 = model_from(j.at("gp_f2"));
      if (j.contains("wall_seconds")) r.wall_seconds = j.at("wall_seconds").get<double>();
      log.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw DataError("run log line " + std::to_string(lineno) + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw DataError("run log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

void write_archive(std::ostream& out, const ParetoArchive& archive) {
  const auto sols = archive.solutions();
  const auto pts = archive.points();
  spec_header(out, sols.empty() ? 0 : sols.front().size());
  out << "f1\tf2\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    spec_cells(out, sols[i]);
    out << format_number(pts[i].f1) << '\t' << format_number(pts[i].f2) << '\n';
  }
}

std::vector<ArchiveRow> read_archive(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("archive file is empty");
  const auto header = split_tabs(line);
  if (header.size() < 2 || header[header.size() - 2] != "f1" || header.back() != "f2") {
    throw DataError("archive header must end with f1, f2");
  }
  const std::size_t dims = header.size() - 2;
  std::vector<ArchiveRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_tabs(line);
    if (cells.size() != header.size()) {
      throw DataError("archive line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                      " columns");
    }
    std::vector<int> c;
    for (std::size_t j = 0; j < dims; ++j) c.push_back(parse_int(cells[j]));
    rows.push_back({BlockSpec(std::move(c)), {parse_double(cells[dims]), parse_double(cells[dims + 1])}});
  }
  return rows;
}

std::vector<BlockSpec> read_spec_list(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.rfind("D1\t", 0) == 0 || text.rfind("f1\t", 0) == 0) {
    std::istringstream again(text);
    std::vector<BlockSpec> specs;
    for (auto& row : read_archive(again)) specs.push_back(std::move(row.spec));
    if (specs.empty()) throw DataError("spec list is empty");
    return specs;
  }
  std::vector<BlockSpec> specs;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    try {
      specs.push_back(parse_block_spec(line));
    } catch (const InvalidArgument& e) {
      throw DataError(e.what());
    }
  }
  if (specs.empty()) throw DataError("spec list is empty");
  return specs;
}

void write_hv_trajectory(std::ostream& out, std::span<const double> hv) {
  out << "t\thv\n";
  for (std::size_t t = 0; t < hv.size(); ++t) out << t << '\t' << format_number(hv[t]) << '\n';
}

void write_evaluations(std::ostream& out, std::span<const Evaluation> evaluations, Estimator estimator, bool timing) {
  spec_header(out, evaluations.empty() ? 0 : evaluations.front().spec.size());
  out << "m\tmu\tsigma\tq_hat\tf1\tf2\testimator\tstatus";
  if (timing) out << "\twall_seconds";
  out << '\n';
  for (const auto& ev : evaluations) {
    spec_cells(out, ev.spec);
    if (ev.objectives) {
      const auto& o = *ev.objectives;
      out << o.block_count << '\t' << format_number(o.params.mu) << '\t' << format_number(o.params.sigma) << '\t'
          << format_number(o.q_hat) << '\t' << format_number(o.f1) << '\t' << format_number(o.f2) << '\t'
          << to_string(estimator) << "\tok";
    } else {
      out << "NA\tNA\tNA\tNA\tNA\tNA\t" << to_string(estimator) << "\tinfeasible: " << ev.failure;
    }
    if (timing) out << '\t' << format_number(ev.wall_seconds);
    out << '\n';
  }
}

void write_summary(std::ostream& out, const OptimizationResult& result, bool timing) {
  json j;
  j["stop"] = std::string(to_string(result.stop));
  j["stop_reason"] = result.stop_reason;
  j["iterations"] = result.iterations;
  j["evaluations"] = result.log.size();
  j["reference"] = point_json(result.reference);
  j["final_hv"] = result.hv_trajectory.empty() ? 0.0 : result.hv_trajectory.back();
  j["archive_size"] = result.archive.size();
  if (timing) {
    j["wall_seconds"] = {{"initial", result.wall.initial},
                         {"reference_placement", result.wall.placement},
                         {"optimization", result.wall.optimization},
                         {"total", result.wall.initial + result.wall.placement + result.wall.optimization}};
  }
  out << j.dump(2) << '\n';
}

void write_validation(std::ostream& out, const ValidationReport& report) {
  spec_header(out, report.rows.empty() ? 0 : report.rows.front().spec.size());
  out << "n\tmean_f1\tstd_f1\tmean_f2\tstd_f2\tinfeasible\n";
  for (const auto& row : report.rows) {
    spec_cells(out, row.spec);
    out << row.count() << '\t' << opt_number(row.mean_f1) << '\t' << opt_number(row.std_f1) << '\t'
        << opt_number(row.mean_f2) << '\t' << opt_number(row.std_f2) << '\t' << row.failures.size() << '\n';
  }
}

void write_validation_raw(std::ostream& out, const ValidationReport& report) {
  spec_header(out, report.rows.empty() ? 0 : report.rows.front().spec.size());
  out << "replication\tf1\tf2\tstatus\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.count(); ++i) {
      spec_cells(out, row.spec);
      out << row.replications[i] << '\t' << format_number(row.f1[i]) << '\t' << format_number(row.f2[i]) << "\tok\n";
    }
    for (const auto& f : row.failures) {
      spec_cells(out, row.spec);
      out << f.replication << "\tNA\tNA\tinfeasible: " << f.reason << '\n';
    }
  }
}

void write_trace(std::ostream& out, const RunTrace& trace, bool timing) {
  json j;
  j["label"] = trace.label;
  j["strategy"] = std::string(to_string(trace.strategy));
  j["reference"] = point_json(trace.reference);
  j["hv_trajectory"] = trace.hv_trajectory;
  if (timing) j["cumulative_seconds"] = trace.cumulative_seconds;
  out << j.dump() << '\n';
}

RunTrace read_trace(std::istream& in) {
  try {
    const json j = json::parse(in);
    RunTrace t;
    t.label = j.at("label").get<std::string>();
    t.strategy = parse_strategy(j.at("strategy").get<std::string>());
    t.reference = point_from(j.at("reference"));
    t.hv_trajectory = j.at("hv_trajectory").get<std::vector<double>>();
    if (j.contains("cumulative_seconds")) t.cumulative_seconds = j.at("cumulative_seconds").get<std::vector<double>>();
    return t;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed run trace: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("malformed run trace: ") + e.what());
  }
}

void write_comparison(std::ostream& out, const Comparison& comparison) {
  out << "label\tstrategy\tfinal_hv\tpct_mobo_gain\tevaluations\ttotal_seconds\n";
  for (const auto& row : comparison.rows) {
    out << row.label << '\t' << to_string(row.strategy) << '\t' << format_number(row.final_hv) << '\t'
        << opt_number(row.pct_mobo_gain) << '\t' << row.evaluations << '\t' << opt_number(row.total_seconds) << '\n';
  }
}

void write_trace_series(std::ostream& out, std::span<const RunTrace> traces) {
  out << "label\tstep\thv\tcumulative_seconds\n";
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.hv_trajectory.size(); ++i) {
      out << t.label << '\t' << i << '\t' << format_number(t.hv_trajectory[i]) << '\t';
      // Timing index i-1 is the evaluation that produced hv_trajectory[i].
      if (i > 0 && i - 1 < t.cumulative_seconds.size()) {
        out << format_number(t.cumulative_seconds[i - 1]);
      } else {
        out << "NA";
      }
      out << '\n';
    }
  }
}

}  // namespace blockopt
