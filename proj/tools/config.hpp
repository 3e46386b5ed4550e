#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <blockopt/grid.hpp>
#include <blockopt/mobo.hpp>
#include <blockopt/objectives.hpp>

namespace blockopt::cli {

struct SyntheticRecipe {
  Shape shape;
  double mean = 0.0;
  double stddev = 1.0;
  std::uint64_t seed = 0;
};

struct DataSource {
  std::optional<SyntheticRecipe> synthetic;
  std::optional<std::filesystem::path> path;
  GridFormat format = GridFormat::Text;
};

enum class Transform { Identity, Negate };

struct ProblemSection {
  std::vector<int> bounds;
  std::optional<std::vector<int>> coupling;
  Estimator estimator = Estimator::MAP;
  std::size_t block_count_floor = 2;
  SolverOptions solver;
};

struct BaselineSection {
  std::size_t random_budget = 0;  ///< 0: take the MOBO run's evaluation count
  std::vector<std::uint64_t> random_seeds{1, 2, 3};
  std::size_t structured_budget = 0;
  std::optional<std::vector<int>> structured_levels;
  std::size_t enumeration_cap = 100000;
};

struct ValidationSection {
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::optional<SyntheticRecipe> data;  ///< defaults to the main synthetic recipe
  std::optional<RegionSelector> fit_region;
  std::optional<RegionSelector> reference_region;
  std::vector<std::filesystem::path> sources;
  GridFormat format = GridFormat::Text;
};

struct RunConfig {
  DataSource data;
  Transform transform = Transform::Identity;
  std::optional<RegionSelector> fit_region;
  std::optional<RegionSelector> reference_region;
  ProblemSection problem;
  OptimizerConfig optimizer;
  BaselineSection baselines;
  ValidationSection validation;
  std::filesystem::path output_dir = "out";
};

/// Parses and fully validates a JSON document. Unknown keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Loads or generates the data and applies the transform.
GriddedDomain load_data(const RunConfig& cfg);

/// Problem over `data` using the configured regions; q is the reference-region maximum.
ProblemDefinition build_problem(const RunConfig& cfg, const GriddedDomain& data,
                                const std::optional<RegionSelector>& fit_region,
                                const std::optional<RegionSelector>& reference_region);

}  // namespace blockopt::cli
