#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace blockopt {

/// Seedable random source with a fixed, portable recipe.
///
/// Raw bits come from std::mt19937_64, whose output sequence is pinned by
/// the C++ standard. Uniform variates take the top 53 bits; normal variates
/// use the polar-free Box-Muller transform and return both outputs of each
/// pair in order (cosine branch first). Nothing here goes through the
/// implementation-defined std::*_distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform on (0, 1].
  double uniform_open_zero();

  /// Uniform integer on [lo, hi], by rejection (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Fill `out` with i.i.d. normals; identical to calling normal() in a loop.
  void fill_normal(std::vector<double>& out, double mean, double stddev);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Randomly digit-scrambled Halton sequence on [0,1)^dim (dim <= 8).
class ScrambledHalton {
 public:
  ScrambledHalton(std::size_t dim, std::uint64_t seed);

  std::vector<double> next();
  std::size_t dim() const { return bases_.size(); }

 private:
  std::vector<unsigned> bases_;
  // perms_[d][digit_position][digit] for the first kDigits positions.
  std::vector<std::vector<std::vector<unsigned>>> perms_;
  std::uint64_t index_ = 1;
};

}  // namespace blockopt
