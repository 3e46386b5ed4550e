#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace blockopt {

using Shape = std::vector<std::size_t>;

/// Regular 1-, 2- or 3-dimensional lattice of finite scalar observations,
/// stored row-major (last index fastest). Immutable once constructed.
class GriddedDomain {
 public:
  /// Validates rank, shape/payload agreement and finiteness.
  GriddedDomain(Shape shape, std::vector<double> values,
                std::optional<std::vector<double>> resolution = std::nullopt);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  /// Physical spacing per dimension. Informational only; blocking works in index space.
  const std::optional<std::vector<double>>& resolution() const { return resolution_; }

  std::size_t stride(std::size_t dim) const;

  /// Shape and values only; resolution is metadata.
  friend bool operator==(const GriddedDomain& a, const GriddedDomain& b) {
    return a.shape_ == b.shape_ && a.values_ == b.values_;
  }

 private:
  Shape shape_;
  std::vector<double> values_;
  std::optional<std::vector<double>> resolution_;
};

/// Contiguous sub-lattice: offsets[j] .. offsets[j] + extent[j] - 1.
struct RegionSelector {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> extent;
};

enum class GridFormat { Text, Binary };

/// Parses "text"/"binary"; throws InvalidArgument otherwise.
GridFormat parse_grid_format(const std::string& name);

GriddedDomain load_grid(const std::filesystem::path& path, GridFormat format);
void write_grid(const GriddedDomain& domain, const std::filesystem::path& path, GridFormat format);

/// In-memory variants of the text format, used by load_grid/write_grid.
GriddedDomain parse_text_grid(const std::string& text);
std::string format_text_grid(const GriddedDomain& domain);

/// i.i.d. N(mean, stddev^2) values drawn with blockopt::Rng(seed), row-major.
GriddedDomain generate_synthetic(const Shape& shape, double mean, double stddev, std::uint64_t seed);

GriddedDomain select_region(const GriddedDomain& domain, const RegionSelector& sel);
GriddedDomain negate_values(const GriddedDomain& domain);
double global_max(const GriddedDomain& domain);

std::string shape_to_string(const Shape& shape);

}  // namespace blockopt
