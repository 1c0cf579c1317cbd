#pragma once
// On-disk cache for sieved windows.
//
// File layout (little-endian):
//   bytes  0..3   magic "PWIN"
//   byte   4      format version, currently 0x01
//   bytes  5..10  reserved, must be zero
//   bytes 11..18  X, u64 LE
//   bytes 19..26  Y, u64 LE
//   bytes 27..    ceil(Y/8) payload bytes
// Payload bit j of byte k (LSB first) is window bit 8k+j, i.e. the
// primality of X+1+8k+j.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gblab/sieve.hpp"

namespace gblab {

/// Raised on malformed or corrupted cache files.
class cache_format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline constexpr char kCacheMagic[4] = {'P', 'W', 'I', 'N'};
inline constexpr u8 kCacheVersion    = 0x01;
inline constexpr u64 kHeaderBytes    = 4 + 1 + 6 + 8 + 8;

inline void put_u64_le(std::vector<u8>& out, u64 v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<u8>((v >> (8 * i)) & 0xFF));
}
inline u64 get_u64_le(const u8* p) {
  u64 v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<u64>(p[i]) << (8 * i);
  return v;
}
}  // namespace detail

inline std::vector<u8> serialize_window(const PrimeWindow& w) {
  std::vector<u8> out;
  const u64 payload = (w.length() + 7) / 8;
  out.reserve(detail::kHeaderBytes + payload);
  out.insert(out.end(), detail::kCacheMagic, detail::kCacheMagic + 4);
  out.push_back(detail::kCacheVersion);
  for (int i = 0; i < 6; ++i) out.push_back(0);
  detail::put_u64_le(out, w.base());
  detail::put_u64_le(out, w.length());
  const auto& words = w.words();
  for (u64 k = 0; k < payload; ++k) {
    const u64 word = words[k >> 3];
    out.push_back(static_cast<u8>((word >> (8 * (k & 7))) & 0xFF));
  }
  return out;
}

inline PrimeWindow parse_window(const std::vector<u8>& bytes) {
  using namespace detail;
  if (bytes.size() < kHeaderBytes)
    throw cache_format_error("window cache: file shorter than header");
  if (std::memcmp(bytes.data(), kCacheMagic, 4) != 0)
    throw cache_format_error("window cache: bad magic");
  if (bytes[4] != kCacheVersion)
    throw cache_format_error("window cache: unsupported version " + std::to_string(bytes[4]));
  for (int i = 5; i < 11; ++i)
    if (bytes[i] != 0) throw cache_format_error("window cache: reserved bytes not zero");
  const u64 X = get_u64_le(bytes.data() + 11);
  const u64 Y = get_u64_le(bytes.data() + 19);
  const u64 payload = (Y + 7) / 8;
  if (bytes.size() != kHeaderBytes + payload)
    throw cache_format_error("window cache: payload is " +
                             std::to_string(bytes.size() - kHeaderBytes) + " bytes, expected " +
                             std::to_string(payload));
  std::vector<u64> words((Y + 63) / 64, 0);
  for (u64 k = 0; k < payload; ++k)
    words[k >> 3] |= static_cast<u64>(bytes[kHeaderBytes + k]) << (8 * (k & 7));
  // Bits past Y in the final byte must be clear.
  if (Y % 8 != 0 && payload > 0) {
    const u8 last = bytes[kHeaderBytes + payload - 1];
    if (last >> (Y % 8)) throw cache_format_error("window cache: stray bits past the window end");
  }
  return PrimeWindow(X, Y, std::move(words));
}

/// Directory-backed cache of sieved windows, one file per (X, Y).
class WindowCache {
 public:
  explicit WindowCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path path_for(u64 X, u64 Y) const {
    return dir_ / ("pwin-" + std::to_string(X) + "-" + std::to_string(Y) + ".pwin");
  }

  /// Sieves (X, X+Y] and writes the cache file, returning its path.
  std::filesystem::path build(u64 X, u64 Y, unsigned workers = 1) const {
    PrimeWindow w = sieve_window(X, Y, workers);
    std::filesystem::create_directories(dir_);
    const auto bytes = serialize_window(w);
    const auto path  = path_for(X, Y);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("window cache: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("window cache: write failed for " + path.string());
    return path;
  }

  /// Loads and validates a cached window.
  PrimeWindow load(u64 X, u64 Y) const {
    const auto path = path_for(X, Y);
    auto bytes      = read_all(path);
    PrimeWindow w   = parse_window(bytes);
    if (w.base() != X || w.length() != Y)
      throw cache_format_error("window cache: header says (" + std::to_string(w.base()) + ", " +
                               std::to_string(w.length()) + "), filename says (" +
                               std::to_string(X) + ", " + std::to_string(Y) + ")");
    return w;
  }

  /// Re-sieves and compares byte-for-byte.  Returns true when the file is
  /// intact; diag receives an explanation otherwise.
  bool verify(u64 X, u64 Y, std::string* diag = nullptr, unsigned workers = 1) const {
    const auto path = path_for(X, Y);
    std::vector<u8> bytes;
    try {
      bytes = read_all(path);
      (void)parse_window(bytes);
    } catch (const std::exception& e) {
      if (diag) *diag = e.what();
      return false;
    }
    const auto fresh = serialize_window(sieve_window(X, Y, workers));
    if (fresh != bytes) {
      if (diag) *diag = "window cache: stored bits differ from a fresh sieve of (" +
                        std::to_string(X) + ", " + std::to_string(Y) + "]";
      return false;
    }
    return true;
  }

  /// Removes the cache file; false when it was not present.
  bool purge(u64 X, u64 Y) const { return std::filesystem::remove(path_for(X, Y)); }

 private:
  static std::vector<u8> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cache_format_error("window cache: cannot open " + path.string());
    std::vector<u8> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
  }

  std::filesystem::path dir_;
};

/// Cache directory resolution: explicit flag, else $GBLAB_CACHE_DIR, else
/// ./pwin-cache.
inline std::filesystem::path resolve_cache_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("GBLAB_CACHE_DIR"); env && *env) return env;
  return "pwin-cache";
}

}  // namespace gblab
