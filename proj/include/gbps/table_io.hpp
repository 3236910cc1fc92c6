#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gbps/errors.hpp"
#include "gbps/weight_table.hpp"

namespace gbps {

// Binary cache layout (little endian throughout):
//   magic      4 bytes   "GBPS" for weight tables, "GBGS" for derived series
//   version    u32       currently 1
//   kind       u8        WeightKind of the (source) table
//   n_max      u64
//   payload    f64[...]  table: values[1..n_max]; series: g[2..n_max]
// Round-trips are bit exact: payload bytes are the in-memory doubles.
static_assert(std::endian::native == std::endian::little,
              "cache layout assumes a little-endian host");

inline constexpr std::uint32_t kCacheVersion = 1;
inline constexpr char kTableMagic[4] = {'G', 'B', 'P', 'S'};
inline constexpr char kSeriesMagic[4] = {'G', 'B', 'G', 'S'};

namespace detail {

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is, const char* field) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) {
    throw format_error(std::string("cache file truncated while reading ") +
                       field);
  }
  return v;
}

inline WeightKind read_kind_byte(std::istream& is) {
  const auto b = read_raw<std::uint8_t>(is, "kind");
  if (b > 2) {
    throw format_error("cache file has unknown weight kind byte " +
                       std::to_string(b));
  }
  return static_cast<WeightKind>(b);
}

inline void read_header(std::istream& is, const char expected_magic[4],
                        WeightKind* kind, std::uint64_t* n_max) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, expected_magic, 4) != 0) {
    throw format_error("cache file has wrong magic");
  }
  const auto version = read_raw<std::uint32_t>(is, "version");
  if (version != kCacheVersion) {
    throw format_error("cache file version " + std::to_string(version) +
                       " is not supported");
  }
  *kind = read_kind_byte(is);
  *n_max = read_raw<std::uint64_t>(is, "n_max");
  if (*n_max == 0) throw format_error("cache file declares an empty table");
}

inline void read_payload(std::istream& is, double* dst, std::uint64_t count) {
  is.read(reinterpret_cast<char*>(dst),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!is || static_cast<std::uint64_t>(is.gcount()) != count * sizeof(double)) {
    throw format_error("cache file truncated inside payload");
  }
  if (is.peek() != std::istream::traits_type::eof()) {
    throw format_error("cache file has trailing bytes after payload");
  }
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw format_error("cannot open " + path.string() + " for writing");
  return os;
}

inline std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw format_error("cannot open " + path.string() + " for reading");
  return is;
}

}  // namespace detail

inline void write_table(const WeightTable& t,
                        const std::filesystem::path& path) {
  auto os = detail::open_for_write(path);
  os.write(kTableMagic, 4);
  detail::write_raw(os, kCacheVersion);
  detail::write_raw(os, static_cast<std::uint8_t>(t.kind));
  detail::write_raw(os, t.n_max);
  os.write(reinterpret_cast<const char*>(t.values.data() + 1),
           static_cast<std::streamsize>(t.n_max * sizeof(double)));
  if (!os) throw format_error("short write to " + path.string());
}

inline WeightTable read_table(const std::filesystem::path& path) {
  auto is = detail::open_for_read(path);
  WeightTable t;
  detail::read_header(is, kTableMagic, &t.kind, &t.n_max);
  t.values.assign(t.n_max + 1, 0.0);
  detail::read_payload(is, t.values.data() + 1, t.n_max);
  return t;
}

// Derived autoconvolution series, cached alongside the tables.  g is stored
// 1-based with g[0] = g[1] = 0; the payload holds g[2..n_max].
struct SeriesCache {
  std::uint64_t n_max = 0;
  WeightKind source_kind = WeightKind::custom;
  std::vector<double> g;
};

inline void write_series(const SeriesCache& s,
                         const std::filesystem::path& path) {
  if (s.n_max < 2 || s.g.size() != s.n_max + 1) {
    throw degenerate_input_error("series cache must cover [2, n_max]");
  }
  auto os = detail::open_for_write(path);
  os.write(kSeriesMagic, 4);
  detail::write_raw(os, kCacheVersion);
  detail::write_raw(os, static_cast<std::uint8_t>(s.source_kind));
  detail::write_raw(os, s.n_max);
  os.write(reinterpret_cast<const char*>(s.g.data() + 2),
           static_cast<std::streamsize>((s.n_max - 1) * sizeof(double)));
  if (!os) throw format_error("short write to " + path.string());
}

inline SeriesCache read_series(const std::filesystem::path& path) {
  auto is = detail::open_for_read(path);
  SeriesCache s;
  detail::read_header(is, kSeriesMagic, &s.source_kind, &s.n_max);
  if (s.n_max < 2) throw format_error("series cache shorter than g[2]");
  s.g.assign(s.n_max + 1, 0.0);
  detail::read_payload(is, s.g.data() + 2, s.n_max - 1);
  return s;
}

}  // namespace gbps
