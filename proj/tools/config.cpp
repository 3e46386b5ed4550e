#include "config.hpp"

#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include <blockopt/error.hpp>

namespace blockopt::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InvalidArgument("config " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

std::string child(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

template <class T>
T get(const json& obj, const std::string& where, const std::string& key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(child(where, key), "missing or of the wrong type");
  }
}

template <class T>
void get_if(const json& obj, const std::string& where, const std::string& key, T& out) {
  if (obj.contains(key)) out = get<T>(obj, where, key);
}

std::size_t get_count(const json& obj, const std::string& where, const std::string& key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(child(where, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::uint64_t get_seed(const json& obj, const std::string& where, const std::string& key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    fail(child(where, key), "expected an unsigned integer");
  }
  return v.get<std::uint64_t>();
}

Shape parse_shape(const json& obj, const std::string& where) {
  const auto dims = get<std::vector<long long>>(obj, where, "shape");
  if (dims.empty() || dims.size() > 3) fail(child(where, "shape"), "rank must be 1, 2 or 3");
  Shape s;
  for (long long d : dims) {
    if (d < 1) fail(child(where, "shape"), "entries must be positive");
    s.push_back(static_cast<std::size_t>(d));
  }
  return s;
}

SyntheticRecipe parse_recipe(const json& obj, const std::string& where, const std::set<std::string>& extra = {}) {
  std::set<std::string> allowed{"shape", "mean", "stddev", "seed"};
  allowed.insert(extra.begin(), extra.end());
  check_keys(obj, where, allowed);
  SyntheticRecipe r;
  r.shape = parse_shape(obj, where);
  get_if(obj, where, "mean", r.mean);
  get_if(obj, where, "stddev", r.stddev);
  r.seed = get_seed(obj, where, "seed", 0);
  if (!(r.stddev > 0.0)) fail(child(where, "stddev"), "must be positive");
  return r;
}

RegionSelector parse_region(const json& obj, const std::string& where) {
  check_keys(obj, where, {"offsets", "extent"});
  RegionSelector r;
  const auto ext = get<std::vector<long long>>(obj, where, "extent");
  std::vector<long long> off(ext.size(), 0);
  if (obj.contains("offsets")) off = get<std::vector<long long>>(obj, where, "offsets");
  if (off.size() != ext.size()) fail(where, "offsets and extent differ in length");
  for (std::size_t j = 0; j < ext.size(); ++j) {
    if (off[j] < 0 || ext[j] < 1) fail(where, "offsets must be >= 0 and extents >= 1");
    r.offsets.push_back(static_cast<std::size_t>(off[j]));
    r.extent.push_back(static_cast<std::size_t>(ext[j]));
  }
  return r;
}

void check_region_fits(const RegionSelector& r, const Shape& shape, const std::string& where) {
  if (r.extent.size() != shape.size()) fail(where, "rank does not match the data shape " + shape_to_string(shape));
  for (std::size_t j = 0; j < shape.size(); ++j) {
    if (r.offsets[j] + r.extent[j] > shape[j]) fail(where, "exceeds the data shape " + shape_to_string(shape));
  }
}

std::vector<int> parse_int_list(const json& obj, const std::string& where, const std::string& key) {
  return get<std::vector<int>>(obj, where, key);
}

PoolMode parse_pool(const std::string& s, const std::string& where) {
  if (s == "auto") return PoolMode::Auto;
  if (s == "full-lattice") return PoolMode::FullLattice;
  if (s == "random-subset") return PoolMode::RandomSubset;
  fail(where, "expected auto, full-lattice or random-subset");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "", {"data", "transform", "fit_region", "reference_region", "problem", "optimizer", "baselines",
                       "validation", "output"});
  RunConfig cfg;

  if (!doc.contains("data")) fail("data", "section is required");
  {
    const json& d = doc.at("data");
    const std::string where = "data";
    const auto source = get<std::string>(d, where, "source");
    if (source == "synthetic") {
      cfg.data.synthetic = parse_recipe(d, where, {"source"});
    } else if (source == "file") {
      check_keys(d, where, {"source", "path", "format"});
      cfg.data.path = get<std::string>(d, where, "path");
      if (d.contains("format")) cfg.data.format = parse_grid_format(get<std::string>(d, where, "format"));
    } else {
      fail("data.source", "expected synthetic or file");
    }
  }

  if (doc.contains("transform")) {
    const auto t = get<std::string>(doc, "", "transform");
    if (t == "identity") {
      cfg.transform = Transform::Identity;
    } else if (t == "negate") {
      cfg.transform = Transform::Negate;
    } else {
      fail("transform", "expected identity or negate");
    }
  }
  if (doc.contains("fit_region")) cfg.fit_region = parse_region(doc.at("fit_region"), "fit_region");
  if (doc.contains("reference_region")) {
    cfg.reference_region = parse_region(doc.at("reference_region"), "reference_region");
  }
  if (cfg.data.synthetic) {
    if (cfg.fit_region) check_region_fits(*cfg.fit_region, cfg.data.synthetic->shape, "fit_region");
    if (cfg.reference_region) check_region_fits(*cfg.reference_region, cfg.data.synthetic->shape, "reference_region");
  }

  if (!doc.contains("problem")) fail("problem", "section is required");
  {
    const json& p = doc.at("problem");
    const std::string where = "problem";
    check_keys(p, where,
               {"bounds", "coupling", "estimator", "block_count_floor", "gradient_tolerance", "max_solver_iterations"});
    cfg.problem.bounds = parse_int_list(p, where, "bounds");
    if (p.contains("coupling")) cfg.problem.coupling = parse_int_list(p, where, "coupling");
    if (p.contains("estimator")) cfg.problem.estimator = parse_estimator(get<std::string>(p, where, "estimator"));
    cfg.problem.block_count_floor = get_count(p, where, "block_count_floor", 2);
    get_if(p, where, "gradient_tolerance", cfg.problem.solver.gradient_tolerance);
    get_if(p, where, "max_solver_iterations", cfg.problem.solver.max_iterations);
    if (cfg.problem.bounds.empty()) fail("problem.bounds", "must not be empty");
    for (int u : cfg.problem.bounds) {
      if (u < 1) fail("problem.bounds", "entries must be at least 1");
    }
    if (cfg.problem.coupling && cfg.problem.bounds.size() != 1) {
      fail("problem.coupling", "a coupled problem takes exactly one bound");
    }
    if (cfg.problem.block_count_floor < 2) fail("problem.block_count_floor", "must be at least 2");
    if (!(cfg.problem.solver.gradient_tolerance > 0.0)) fail("problem.gradient_tolerance", "must be positive");
    if (cfg.problem.solver.max_iterations < 1) fail("problem.max_solver_iterations", "must be at least 1");
    if (cfg.data.synthetic) {
      const Shape& s = cfg.fit_region ? Shape(cfg.fit_region->extent.begin(), cfg.fit_region->extent.end())
                                      : cfg.data.synthetic->shape;
      const std::size_t dims = cfg.problem.coupling ? cfg.problem.coupling->size() : cfg.problem.bounds.size();
      if (dims != s.size()) fail("problem", "decision dimensions do not match the fit region rank");
    }
  }

  if (doc.contains("optimizer")) {
    const json& o = doc.at("optimizer");
    const std::string where = "optimizer";
    check_keys(o, where,
               {"init_points", "window", "tolerance", "growth_factor", "max_iterations", "seed", "pool", "pool_size",
                "full_lattice_limit", "neighbors", "gp_restarts", "gp_max_iterations"});
    auto& oc = cfg.optimizer;
    oc.init_points = get_count(o, where, "init_points", oc.init_points);
    oc.window = get_count(o, where, "window", oc.window);
    get_if(o, where, "tolerance", oc.tolerance);
    get_if(o, where, "growth_factor", oc.growth_factor);
    oc.max_iterations = get_count(o, where, "max_iterations", oc.max_iterations);
    oc.seed = get_seed(o, where, "seed", oc.seed);
    if (o.contains("pool")) oc.pool = parse_pool(get<std::string>(o, where, "pool"), "optimizer.pool");
    oc.random_pool_size = get_count(o, where, "pool_size", oc.random_pool_size);
    oc.full_lattice_limit = get_count(o, where, "full_lattice_limit", oc.full_lattice_limit);
    oc.neighbor_count = get_count(o, where, "neighbors", oc.neighbor_count);
    oc.gp.restarts = static_cast<int>(get_count(o, where, "gp_restarts", static_cast<std::size_t>(oc.gp.restarts)));
    oc.gp.max_iterations =
        static_cast<int>(get_count(o, where, "gp_max_iterations", static_cast<std::size_t>(oc.gp.max_iterations)));
    if (oc.gp.restarts < 1) fail("optimizer.gp_restarts", "must be at least 1");
    if (oc.gp.max_iterations < 1) fail("optimizer.gp_max_iterations", "must be at least 1");
  }
  try {
    cfg.optimizer.validate();
  } catch (const InvalidArgument& e) {
    fail("optimizer", e.what());
  }

  if (doc.contains("baselines")) {
    const json& b = doc.at("baselines");
    const std::string where = "baselines";
    check_keys(b, where, {"random_budget", "random_seeds", "structured_budget", "structured_levels", "enumeration_cap"});
    auto& bc = cfg.baselines;
    bc.random_budget = get_count(b, where, "random_budget", 0);
    if (b.contains("random_seeds")) bc.random_seeds = get<std::vector<std::uint64_t>>(b, where, "random_seeds");
    bc.structured_budget = get_count(b, where, "structured_budget", 0);
    if (b.contains("structured_levels")) bc.structured_levels = parse_int_list(b, where, "structured_levels");
    bc.enumeration_cap = get_count(b, where, "enumeration_cap", bc.enumeration_cap);
    if (bc.random_seeds.empty()) fail("baselines.random_seeds", "must not be empty");
    if (bc.structured_levels && bc.structured_levels->size() != cfg.problem.bounds.size()) {
      fail("baselines.structured_levels", "need one level count per bound");
    }
  }

  if (doc.contains("validation")) {
    const json& v = doc.at("validation");
    const std::string where = "validation";
    check_keys(v, where, {"replications", "seed", "data", "fit_region", "reference_region", "sources", "format"});
    auto& vc = cfg.validation;
    vc.replications = get_count(v, where, "replications", 0);
    vc.seed = get_seed(v, where, "seed", 0);
    if (v.contains("data")) vc.data = parse_recipe(v.at("data"), "validation.data");
    if (v.contains("fit_region")) vc.fit_region = parse_region(v.at("fit_region"), "validation.fit_region");
    if (v.contains("reference_region")) {
      vc.reference_region = parse_region(v.at("reference_region"), "validation.reference_region");
    }
    if (v.contains("sources")) {
      for (const auto& s : get<std::vector<std::string>>(v, where, "sources")) vc.sources.emplace_back(s);
    }
    if (v.contains("format")) vc.format = parse_grid_format(get<std::string>(v, where, "format"));
    const auto* recipe = vc.data ? &*vc.data : cfg.data.synthetic ? &*cfg.data.synthetic : nullptr;
    if (recipe) {
      if (vc.fit_region) check_region_fits(*vc.fit_region, recipe->shape, "validation.fit_region");
      if (vc.reference_region) check_region_fits(*vc.reference_region, recipe->shape, "validation.reference_region");
    }
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    check_keys(o, "output", {"directory"});
    cfg.output_dir = get<std::string>(o, "output", "directory");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

GriddedDomain load_data(const RunConfig& cfg) {
  GriddedDomain data = cfg.data.synthetic
                           ? generate_synthetic(cfg.data.synthetic->shape, cfg.data.synthetic->mean,
                                                cfg.data.synthetic->stddev, cfg.data.synthetic->seed)
                           : load_grid(*cfg.data.path, cfg.data.format);
  if (cfg.transform == Transform::Negate) data = negate_values(data);
  return data;
}

ProblemDefinition build_problem(const RunConfig& cfg, const GriddedDomain& data,
                                const std::optional<RegionSelector>& fit_region,
                                const std::optional<RegionSelector>& reference_region) {
  ProblemDefinition p;
  p.fit_domain = std::make_shared<const GriddedDomain>(fit_region ? select_region(data, *fit_region) : data);
  p.reference_extreme_q = reference_region ? global_max(select_region(data, *reference_region)) : global_max(data);
  p.bounds = cfg.problem.bounds;
  p.coupling = cfg.problem.coupling;
  p.estimator = cfg.problem.estimator;
  p.block_count_floor = cfg.problem.block_count_floor;
  p.solver = cfg.problem.solver;
  p.validate();
  return p;
}

}  // namespace blockopt::cli
