#include "blockopt/grid.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "blockopt/error.hpp"
#include "blockopt/rng.hpp"

namespace blockopt {

namespace {

constexpr std::array<char, 3> kBinaryMagic = {'B', 'M', 'G'};
constexpr std::size_t kBinaryHeaderBytes = 16;

std::size_t product(const Shape& shape) {
  std::size_t n = 1;
  for (auto l : shape) n *= l;
  return n;
}

void check_shape(const Shape& shape) {
  if (shape.empty() || shape.size() > 3) {
    throw InvalidArgument("grid rank must be 1, 2 or 3 (got " + std::to_string(shape.size()) + ")");
  }
  for (auto l : shape) {
    if (l == 0) throw InvalidArgument("grid shape entries must be positive: " + shape_to_string(shape));
  }
}

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return static_cast<T>(v);
}

std::string read_file(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot open grid file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

Shape parse_shape_header(std::string_view line) {
  constexpr std::string_view kPrefix = "shape=";
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
    line.remove_suffix(1);
  }
  if (line.substr(0, kPrefix.size()) != kPrefix) {
    throw DataError("line 1: expected header 'shape=L1xL2[xL3]'");
  }
  line.remove_prefix(kPrefix.size());
  Shape shape;
  while (true) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc() || ptr == line.data()) throw DataError("line 1: malformed shape header");
    shape.push_back(value);
    line.remove_prefix(static_cast<std::size_t>(ptr - line.data()));
    if (line.empty()) break;
    if (line.front() != 'x') throw DataError("line 1: malformed shape header");
    line.remove_prefix(1);
  }
  try {
    check_shape(shape);
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("line 1: ") + e.what());
  }
  return shape;
}

}  // namespace

std::string shape_to_string(const Shape& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(shape[i]);
  }
  return s;
}

GriddedDomain::GriddedDomain(Shape shape, std::vector<double> values,
                             std::optional<std::vector<double>> resolution)
    : shape_(std::move(shape)), values_(std::move(values)), resolution_(std::move(resolution)) {
  check_shape(shape_);
  if (product(shape_) != values_.size()) {
    throw DataError("shape " + shape_to_string(shape_) + " needs " + std::to_string(product(shape_)) +
                    " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("non-finite value at flat index " + std::to_string(i));
    }
  }
  if (resolution_ && resolution_->size() != shape_.size()) {
    throw InvalidArgument("resolution must have one entry per dimension");
  }
}

std::size_t GriddedDomain::stride(std::size_t dim) const {
  std::size_t s = 1;
  for (std::size_t j = dim + 1; j < shape_.size(); ++j) s *= shape_[j];
  return s;
}

GridFormat parse_grid_format(const std::string& name) {
  if (name == "text") return GridFormat::Text;
  if (name == "binary") return GridFormat::Binary;
  throw InvalidArgument("unknown grid format '" + name + "' (expected text or binary)");
}

GriddedDomain parse_text_grid(const std::string& text) {
  const auto eol = text.find('\n');
  const Shape shape = parse_shape_header(std::string_view(text).substr(0, eol));
  const std::size_t expected = product(shape);

  std::vector<double> values;
  values.reserve(expected);
  std::size_t line = 2;
  const char* p = eol == std::string::npos ? text.data() + text.size() : text.data() + eol + 1;
  const char* end = text.data() + text.size();
  while (p < end) {
    if (*p == '\n') {
      ++line;
      ++p;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(*p))) {
      ++p;
      continue;
    }
    const char* tok_end = p;
    while (tok_end < end && !std::isspace(static_cast<unsigned char>(*tok_end))) ++tok_end;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(p, tok_end, v);
    const std::string where = "line " + std::to_string(line) + ", value " + std::to_string(values.size() + 1);
    if (ec != std::errc() || ptr != tok_end) {
      throw DataError(where + ": cannot parse '" + std::string(p, tok_end) + "'");
    }
    if (!std::isfinite(v)) {
      throw DataError(where + ": non-finite value '" + std::string(p, tok_end) + "'");
    }
    values.push_back(v);
    p = tok_end;
  }
  if (values.size() != expected) {
    throw DataError("header shape " + shape_to_string(shape) + " declares " + std::to_string(expected) +
                    " values, payload has " + std::to_string(values.size()));
  }
  return GriddedDomain(shape, std::move(values));
}

std::string format_text_grid(const GriddedDomain& domain) {
  std::string out = "shape=" + shape_to_string(domain.shape()) + "\n";
  const std::size_t row = domain.shape().back();
  std::array<char, 32> buf{};
  const auto values = domain.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    // Shortest representation that round-trips exactly.
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), values[i]);
    out.append(buf.data(), ptr);
    out.push_back((i + 1) % row == 0 ? '\n' : ' ');
  }
  return out;
}

GriddedDomain load_grid(const std::filesystem::path& path, GridFormat format) {
  if (format == GridFormat::Text) {
    try {
      return parse_text_grid(read_file(path, false));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }

  const std::string bytes = read_file(path, true);
  if (bytes.size() < kBinaryHeaderBytes ||
      std::memcmp(bytes.data(), kBinaryMagic.data(), kBinaryMagic.size()) != 0) {
    throw DataError(path.string() + ": missing binary grid header");
  }
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  const unsigned rank = raw[3];
  if (rank < 1 || rank > 3) throw DataError(path.string() + ": header rank must be 1..3");
  Shape shape;
  for (unsigned j = 0; j < rank; ++j) shape.push_back(get_le<std::uint32_t>(raw + 4 + 4 * j));
  try {
    check_shape(shape);
  } catch (const InvalidArgument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  const std::size_t expected = product(shape);
  const std::size_t payload = bytes.size() - kBinaryHeaderBytes;
  if (payload != expected * 8) {
    throw DataError(path.string() + ": header shape " + shape_to_string(shape) + " declares " +
                    std::to_string(expected) + " values, payload holds " + std::to_string(payload / 8) +
                    (payload % 8 ? " (plus a partial value)" : ""));
  }
  std::vector<double> values(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    const auto u = get_le<std::uint64_t>(raw + kBinaryHeaderBytes + 8 * i);
    values[i] = std::bit_cast<double>(u);
    if (!std::isfinite(values[i])) {
      throw DataError(path.string() + ": non-finite value at index " + std::to_string(i));
    }
  }
  return GriddedDomain(std::move(shape), std::move(values));
}

void write_grid(const GriddedDomain& domain, const std::filesystem::path& path, GridFormat format) {
  std::string out;
  if (format == GridFormat::Text) {
    out = format_text_grid(domain);
  } else {
    out.reserve(kBinaryHeaderBytes + 8 * domain.size());
    out.append(kBinaryMagic.data(), kBinaryMagic.size());
    out.push_back(static_cast<char>(domain.rank()));
    for (std::size_t j = 0; j < 3; ++j) {
      const std::size_t l = j < domain.rank() ? domain.shape()[j] : 0;
      if (l > 0xFFFFFFFFu) throw InvalidArgument("binary grid dimensions must fit in 32 bits");
      put_le(out, static_cast<std::uint32_t>(l));
    }
    for (double v : domain.values()) put_le(out, std::bit_cast<std::uint64_t>(v));
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write grid file: " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw DataError("short write to grid file: " + path.string());
}

GriddedDomain generate_synthetic(const Shape& shape, double mean, double stddev, std::uint64_t seed) {
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    throw InvalidArgument("generate_synthetic: stddev must be positive");
  }
  if (!std::isfinite(mean)) throw InvalidArgument("generate_synthetic: mean must be finite");
  check_shape(shape);
  std::vector<double> values(product(shape));
  Rng rng(seed);
  rng.fill_normal(values, mean, stddev);
  return GriddedDomain(shape, std::move(values));
}

GriddedDomain select_region(const GriddedDomain& domain, const RegionSelector& sel) {
  const auto& shape = domain.shape();
  const std::size_t n = shape.size();
  if (sel.offsets.size() != n || sel.extent.size() != n) {
    throw InvalidArgument("region selector rank does not match domain rank");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (sel.extent[j] == 0) throw InvalidArgument("region extent must be positive");
    if (sel.offsets[j] + sel.extent[j] > shape[j]) {
      throw InvalidArgument("region out of bounds in dimension " + std::to_string(j) + ": " +
                            std::to_string(sel.offsets[j]) + " + " + std::to_string(sel.extent[j]) + " > " +
                            std::to_string(shape[j]));
    }
  }

  std::vector<double> out;
  out.reserve(product(sel.extent));
  const auto src = domain.values();
  // Copy rows along the last dimension.
  const std::size_t row = sel.extent[n - 1];
  std::vector<std::size_t> idx(n, 0);
  const std::size_t rows = product(sel.extent) / row;
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < n; ++j) flat += (sel.offsets[j] + idx[j]) * domain.stride(j);
    out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(flat),
               src.begin() + static_cast<std::ptrdiff_t>(flat + row));
    for (std::size_t j = n - 1; j-- > 0;) {
      if (++idx[j] < sel.extent[j]) break;
      idx[j] = 0;
    }
  }
  std::optional<std::vector<double>> res = domain.resolution();
  return GriddedDomain(sel.extent, std::move(out), std::move(res));
}

GriddedDomain negate_values(const GriddedDomain& domain) {
  std::vector<double> out(domain.values().begin(), domain.values().end());
  for (auto& v : out) v = -v;
  return GriddedDomain(domain.shape(), std::move(out), domain.resolution());
}

double global_max(const GriddedDomain& domain) {
  const auto v = domain.values();
  if (v.empty()) throw InvalidArgument("global_max of an empty domain");
  return *std::max_element(v.begin(), v.end());
}

}  // namespace blockopt
