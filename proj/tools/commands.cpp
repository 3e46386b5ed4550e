#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <blockopt/baselines.hpp>
#include <blockopt/error.hpp>
#include <blockopt/mobo.hpp>
#include <blockopt/records.hpp>
#include <blockopt/rng.hpp>
#include <blockopt/validate.hpp>

#include "config.hpp"

namespace blockopt::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out;
  bool timing = false;
};

// Files are collected in memory and written only after the command succeeded.
class Artifacts {
 public:
  std::ostringstream& add(const std::string& name) { return files_[name]; }

  void commit(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& [name, body] : files_) {
      std::ofstream os(dir / name, std::ios::binary);
      os << body.str();
      if (!os) throw DataError("cannot write " + (dir / name).string());
    }
  }

 private:
  std::map<std::string, std::ostringstream> files_;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunConfig prepare(const GlobalOptions& g) {
  if (g.config.empty()) throw InvalidArgument("--config is required");
  RunConfig cfg = load_config(g.config);
  if (!g.out.empty()) cfg.output_dir = g.out;
  cfg.optimizer.workers = g.workers;
  return cfg;
}

ProblemDefinition main_problem(const RunConfig& cfg) {
  const GriddedDomain data = load_data(cfg);
  return build_problem(cfg, data, cfg.fit_region, cfg.reference_region);
}

Point2 parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InvalidArgument("reference point must be 'f1,f2'");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw InvalidArgument("malformed reference point '" + text + "'");
  }
}

struct MoboRunInfo {
  Point2 reference;
  std::size_t evaluations = 0;
};

MoboRunInfo read_mobo_run(const fs::path& dir) {
  try {
    const auto j = nlohmann::json::parse(read_file(dir / "summary.json"));
    const auto& r = j.at("reference");
    return {{r.at(0).get<double>(), r.at(1).get<double>()}, j.at("evaluations").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed " + (dir / "summary.json").string() + ": " + e.what());
  }
}

// Reference point and default budget shared by the baseline commands.
struct BaselineContext {
  Point2 reference{0.0, 0.0};
  std::optional<std::size_t> mobo_evaluations;
};

BaselineContext baseline_context(const std::string& reference, const std::string& mobo_run) {
  BaselineContext ctx;
  if (!reference.empty() && !mobo_run.empty()) throw InvalidArgument("give either --reference or --mobo-run");
  if (!reference.empty()) ctx.reference = parse_point(reference);
  if (!mobo_run.empty()) {
    const auto info = read_mobo_run(mobo_run);
    ctx.reference = info.reference;
    ctx.mobo_evaluations = info.evaluations;
  }
  return ctx;
}

void write_front(std::ostream& out, const EnumerationResult& en) {
  const auto& evs = en.run.evaluations;
  const std::size_t dims = evs.empty() ? 0 : evs.front().spec.size();
  for (std::size_t j = 0; j < dims; ++j) out << 'D' << (j + 1) << '\t';
  out << "f1\tf2\n";
  for (std::size_t i : en.front) {
    for (int c : evs[i].spec.counts) out << c << '\t';
    out << format_number(evs[i].objectives->f1) << '\t' << format_number(evs[i].objectives->f2) << '\n';
  }
}

int cmd_optimize(const GlobalOptions& g, std::ostream& out) {
  RunConfig cfg = prepare(g);
  if (g.seed) cfg.optimizer.seed = *g.seed;
  const ProblemDefinition problem = main_problem(cfg);
  const OptimizationResult res = run(problem, cfg.optimizer);

  Artifacts a;
  write_run_log(a.add("run_log.jsonl"), res.log, g.timing);
  write_archive(a.add("archive.tsv"), res.archive);
  write_hv_trajectory(a.add("hv_trajectory.tsv"), res.hv_trajectory);
  write_summary(a.add("summary.json"), res, g.timing);
  write_trace(a.add("trace.json"), make_trace(res, "mobo"), g.timing);
  if (g.timing) {
    auto& t = a.add("timing.tsv");
    t << "step\tphase\twall_seconds\n";
    for (const auto& r : res.log) t << r.step << '\t' << to_string(r.phase) << '\t' << format_number(r.wall_seconds) << '\n';
  }
  a.commit(cfg.output_dir);
  out << "optimize: " << res.iterations << " iterations, " << res.log.size() << " evaluations, archive of "
      << res.archive.size() << ", HV " << format_number(res.archive.hypervolume()) << " (" << res.stop_reason
      << ")\n";
  return kExitOk;
}

int cmd_enumerate(const GlobalOptions& g, const std::string& reference, const std::string& mobo_run,
                  std::ostream& out) {
  const RunConfig cfg = prepare(g);
  const BaselineContext ctx = baseline_context(reference, mobo_run);
  const ProblemDefinition problem = main_problem(cfg);
  BaselineOptions opts;
  opts.reference = ctx.reference;
  opts.workers = g.workers;
  const EnumerationResult en = enumerate_all(problem, opts, cfg.baselines.enumeration_cap);

  Artifacts a;
  write_evaluations(a.add("enumeration_evaluations.tsv"), en.run.evaluations, problem.estimator, g.timing);
  write_front(a.add("enumeration_front.tsv"), en);
  write_archive(a.add("enumeration_archive.tsv"), en.run.archive);
  write_trace(a.add("enumeration_trace.json"), make_trace(en.run, "enumeration"), g.timing);
  a.commit(cfg.output_dir);
  out << "enumerate: " << en.run.evaluations.size() << " specs, front of " << en.front.size() << ", max HV "
      << format_number(en.run.archive.hypervolume()) << '\n';
  return kExitOk;
}

int cmd_baseline(const GlobalOptions& g, const std::string& strategy_name, std::size_t budget,
                 const std::string& reference, const std::string& mobo_run, std::ostream& out) {
  const RunConfig cfg = prepare(g);
  const Strategy strategy = parse_strategy(strategy_name);
  if (strategy != Strategy::Random && strategy != Strategy::Structured) {
    throw InvalidArgument("--strategy must be random or structured");
  }
  const BaselineContext ctx = baseline_context(reference, mobo_run);
  if (budget == 0) budget = strategy == Strategy::Random ? cfg.baselines.random_budget : cfg.baselines.structured_budget;
  if (budget == 0 && ctx.mobo_evaluations) budget = *ctx.mobo_evaluations;
  if (budget == 0) throw InvalidArgument("no budget: pass --budget, set it in the config, or give --mobo-run");

  const ProblemDefinition problem = main_problem(cfg);
  BaselineOptions opts;
  opts.reference = ctx.reference;
  opts.workers = g.workers;
  std::string label;
  BaselineRun runres;
  if (strategy == Strategy::Random) {
    const std::uint64_t seed = g.seed ? *g.seed : cfg.baselines.random_seeds.front();
    label = "random-s" + std::to_string(seed);
    runres = random_baseline(problem, budget, seed, opts);
  } else {
    label = "structured";
    runres = structured_grid(problem, budget, opts, cfg.baselines.structured_levels);
  }

  Artifacts a;
  write_evaluations(a.add(label + "_evaluations.tsv"), runres.evaluations, problem.estimator, g.timing);
  write_archive(a.add(label + "_archive.tsv"), runres.archive);
  write_trace(a.add(label + "_trace.json"), make_trace(runres, label), g.timing);
  a.commit(cfg.output_dir);
  out << "baseline " << label << ": " << runres.evaluations.size() << " specs, HV "
      << format_number(runres.archive.hypervolume()) << '\n';
  return kExitOk;
}

int cmd_validate(const GlobalOptions& g, const std::string& front, const std::vector<std::string>& sources,
                 std::ostream& out) {
  const RunConfig cfg = prepare(g);
  if (front.empty()) throw InvalidArgument("--front is required");
  std::vector<BlockSpec> specs;
  {
    std::ifstream in(front);
    if (!in) throw DataError("cannot open front file " + front);
    specs = read_spec_list(in);
  }
  const auto& vc = cfg.validation;
  std::vector<fs::path> files(vc.sources.begin(), vc.sources.end());
  for (const auto& s : sources) files.emplace_back(s);

  ValidationReport report;
  if (!files.empty()) {
    RunConfig per = cfg;
    report = out_of_sample(
        specs, files.size(),
        [&](std::size_t i) {
          GriddedDomain data = load_grid(files[i], vc.format);
          if (cfg.transform == Transform::Negate) data = negate_values(data);
          return build_problem(per, data, vc.fit_region, vc.reference_region);
        },
        g.workers);
  } else {
    const SyntheticRecipe* recipe = vc.data ? &*vc.data : cfg.data.synthetic ? &*cfg.data.synthetic : nullptr;
    if (!recipe) throw InvalidArgument("validation needs test sources or a synthetic recipe");
    if (vc.replications == 0) throw InvalidArgument("validation.replications must be positive");
    const std::uint64_t seed = g.seed ? *g.seed : vc.seed;
    report = out_of_sample(
        specs, vc.replications,
        [&](std::size_t i) {
          GriddedDomain data = generate_synthetic(recipe->shape, recipe->mean, recipe->stddev, mix_seed(seed, i));
          if (cfg.transform == Transform::Negate) data = negate_values(data);
          return build_problem(cfg, data, vc.fit_region, vc.reference_region);
        },
        g.workers);
  }

  Artifacts a;
  write_validation(a.add("validation.tsv"), report);
  write_validation_raw(a.add("validation_raw.tsv"), report);
  a.commit(cfg.output_dir);
  std::size_t infeasible = 0;
  for (const auto& r : report.rows) infeasible += r.failures.size();
  out << "validate: " << report.rows.size() << " specs x " << report.test_problems << " test problems";
  if (infeasible) out << " (" << infeasible << " infeasible pairs footnoted in validation_raw.tsv)";
  out << '\n';
  return kExitOk;
}

int cmd_compare(const GlobalOptions& g, const std::string& mobo, const std::vector<std::string>& runs,
                std::ostream& out) {
  if (mobo.empty()) throw InvalidArgument("--mobo is required");
  const auto load = [](const fs::path& p) {
    const fs::path file = fs::is_directory(p) ? p / "trace.json" : p;
    std::istringstream in(read_file(file));
    return read_trace(in);
  };
  const RunTrace mobo_trace = load(mobo);
  std::vector<RunTrace> traces;
  for (const auto& r : runs) traces.push_back(load(r));
  const Comparison cmp = compare_hv(traces, mobo_trace);

  fs::path dir = g.out;
  if (dir.empty() && !g.config.empty()) dir = load_config(g.config).output_dir;
  if (dir.empty()) dir = "out";
  std::vector<RunTrace> all{mobo_trace};
  all.insert(all.end(), traces.begin(), traces.end());
  Artifacts a;
  write_comparison(a.add("comparison.tsv"), cmp);
  write_trace_series(a.add("trace_series.tsv"), all);
  a.commit(dir);
  write_comparison(out, cmp);
  return kExitOk;
}

int cmd_simulate(const GlobalOptions& g, const std::string& format, std::ostream& out) {
  const RunConfig cfg = prepare(g);
  if (!cfg.data.synthetic) throw InvalidArgument("simulate needs a synthetic data recipe");
  SyntheticRecipe r = *cfg.data.synthetic;
  if (g.seed) r.seed = *g.seed;
  const GridFormat fmt = parse_grid_format(format);
  const GriddedDomain d = generate_synthetic(r.shape, r.mean, r.stddev, r.seed);
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw DataError("cannot create output directory " + cfg.output_dir.string());
  const fs::path file = cfg.output_dir / (fmt == GridFormat::Text ? "surface.txt" : "surface.bmg");
  write_grid(d, file, fmt);
  out << "simulate: wrote " << file.string() << " (" << shape_to_string(d.shape()) << ")\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block-size selection for block-maxima extreme value analysis"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--config", g.config, "JSON run configuration");
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--workers", g.workers, "worker threads (0 = all cores)");
    sub->add_option("--out", g.out, "output directory (overrides the config)");
    sub->add_flag("--timing", g.timing, "record wall times in the artifacts");
  };

  auto* optimize = app.add_subcommand("optimize", "run the Bayesian optimizer");
  add_globals(optimize);

  std::string reference, mobo_run;
  auto* enumerate = app.add_subcommand("enumerate", "score every decision of the lattice");
  add_globals(enumerate);
  enumerate->add_option("--reference", reference, "reference point f1,f2 for HV");
  enumerate->add_option("--mobo-run", mobo_run, "take the reference point from an optimize output directory");

  std::string strategy;
  std::size_t budget = 0;
  auto* baseline = app.add_subcommand("baseline", "random or structured comparison run");
  add_globals(baseline);
  baseline->add_option("--strategy", strategy, "random or structured")->required();
  baseline->add_option("--budget", budget, "number of evaluations");
  baseline->add_option("--reference", reference, "reference point f1,f2 for HV");
  baseline->add_option("--mobo-run", mobo_run, "take r and the budget from an optimize output directory");

  std::string front;
  std::vector<std::string> sources;
  auto* validate = app.add_subcommand("validate", "out-of-sample evaluation of a set of specs");
  add_globals(validate);
  validate->add_option("--front", front, "archive or spec list")->required();
  validate->add_option("--sources", sources, "held-out grid files (default: synthetic replications)");

  std::string mobo;
  std::vector<std::string> runs;
  auto* compare = app.add_subcommand("compare", "HV comparison of baseline runs against an optimizer run");
  add_globals(compare);
  compare->add_option("--mobo", mobo, "optimize output directory or trace file")->required();
  compare->add_option("--runs", runs, "baseline trace files");

  std::string format = "binary";
  auto* simulate = app.add_subcommand("simulate", "write the synthetic surface to a grid file");
  add_globals(simulate);
  simulate->add_option("--format", format, "text or binary");

  std::vector<std::string> argv_tail(args.rbegin(), args.rend());
  if (!argv_tail.empty()) argv_tail.pop_back();
  try {
    app.parse(argv_tail);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) g.seed = seed;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(g, out);
    if (enumerate->parsed()) return cmd_enumerate(g, reference, mobo_run, out);
    if (baseline->parsed()) return cmd_baseline(g, strategy, budget, reference, mobo_run, out);
    if (validate->parsed()) return cmd_validate(g, front, sources, out);
    if (compare->parsed()) return cmd_compare(g, mobo, runs, out);
    if (simulate->parsed()) return cmd_simulate(g, format, out);
  } catch (const InfeasibleSpec& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace blockopt::cli
