#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biorth/numerics/real.hpp"

namespace biorth::moments {

/// A cached entry: rational part (exact paths) or a real value (quadrature).
struct CacheEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  std::optional<Rational> rational;
  std::optional<Real> real;
};

/// Append-only JSON-lines log of moments, one file per (kernel hash, bits):
///   {"kernel_hash": ..., "bits": ..., "format": "biorth-moments/1"}
///   {"i": 0, "j": 1, "num": "1", "den": "2"}
///   {"i": 0, "j": 1, "hex_real": "0x1.8p-1"}
/// Appends take an exclusive flock; reads a shared one.  Unparseable lines
/// (a torn append) are ignored, and the first entry for a key wins.
class MomentCache {
 public:
  MomentCache(std::filesystem::path dir, std::string kernel_hash, long bits);

  const std::filesystem::path& file() const noexcept { return file_; }

  /// Entries keyed by (i, j); reals are parsed at the cache's precision.
  std::map<std::pair<std::size_t, std::size_t>, CacheEntry> load() const;
  void append(const std::vector<CacheEntry>& entries) const;

 private:
  std::filesystem::path file_;
  std::string kernel_hash_;
  long bits_;
};

/// Directory from $BIORTH_CACHE_DIR, if set and non-empty.
std::optional<std::filesystem::path> cache_dir_from_env();

}  // namespace biorth::moments
