#include "blockopt/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "blockopt/error.hpp"

namespace blockopt {

namespace {
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
constexpr std::size_t kHaltonDigits = 40;
}  // namespace

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * kTwoPow53Inv; }

double Rng::uniform_open_zero() {
  return static_cast<double>((engine_() >> 11) + 1) * kTwoPow53Inv;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw InvalidArgument("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit range
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void Rng::fill_normal(std::vector<double>& out, double mean, double stddev) {
  for (auto& v : out) v = mean + stddev * normal();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ScrambledHalton::ScrambledHalton(std::size_t dim, std::uint64_t seed) {
  static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (dim == 0 || dim > std::size(kPrimes)) {
    throw InvalidArgument("ScrambledHalton: dimension must be in [1, 8]");
  }
  Rng rng(seed);
  bases_.assign(kPrimes, kPrimes + dim);
  perms_.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const unsigned b = bases_[d];
    perms_[d].resize(kHaltonDigits);
    for (auto& perm : perms_[d]) {
      perm.resize(b);
      for (unsigned i = 0; i < b; ++i) perm[i] = i;
      // Fisher-Yates on the portable integer draw.
      for (unsigned i = b - 1; i > 0; --i) {
        const auto j = static_cast<unsigned>(rng.uniform_int(0, i));
        std::swap(perm[i], perm[j]);
      }
    }
  }
}

std::vector<double> ScrambledHalton::next() {
  std::vector<double> point(bases_.size());
  for (std::size_t d = 0; d < bases_.size(); ++d) {
    const unsigned b = bases_[d];
    std::uint64_t n = index_;
    double scale = 1.0 / b;
    double value = 0.0;
    // Scramble a fixed number of digits so trailing zeros are permuted too.
    for (std::size_t pos = 0; pos < kHaltonDigits && scale > 1e-17; ++pos) {
      const auto digit = static_cast<unsigned>(n % b);
      value += perms_[d][pos][digit] * scale;
      n /= b;
      scale /= b;
    }
    point[d] = value < 1.0 ? value : std::nextafter(1.0, 0.0);
  }
  ++index_;
  return point;
}

}  // namespace blockopt
