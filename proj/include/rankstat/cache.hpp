#pragma once

// On-disk cache of prime and smallest-prime-factor tables.
//
// File layout (little-endian):
//   bytes 0..3    magic "RKST"
//   bytes 4..5    format version
//   bytes 6..7    table kind (1 = primes, 2 = smallest prime factors)
//   bytes 8..11   x, the bound the table was built for
//   bytes 12..15  CRC-32 of the payload
//   payload       uint32 entries
//
// A file whose version, kind or x disagrees with the request, or whose
// checksum does not match, is treated as absent.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rankstat/sieve.hpp"

namespace rankstat::cache {

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 16;

enum class TableKind : std::uint16_t { Primes = 1, SmallestPrimeFactor = 2 };

std::vector<unsigned char> encode(TableKind kind, std::uint32_t x, const std::vector<std::uint32_t>& entries,
                                  std::uint16_t version = kFormatVersion);

/// Returns the entries when the buffer is a valid, current table for (kind, x).
std::optional<std::vector<std::uint32_t>> decode(const std::vector<unsigned char>& bytes, TableKind kind,
                                                 std::uint32_t x);

class Cache {
 public:
  explicit Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(TableKind kind, std::uint64_t x) const;

  std::optional<std::vector<std::uint32_t>> load(TableKind kind, std::uint64_t x) const;
  /// Writes atomically; returns false (and records a warning) on I/O failure.
  bool store(TableKind kind, std::uint64_t x, const std::vector<std::uint32_t>& entries);

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> warnings_;
};

/// Loads the tables for x from the cache when present and valid, otherwise
/// sieves and (if a cache is given) stores them. The SPF table covers
/// min(x, spf_cap).
stats::PrimeTable load_or_build(Cache* cache, std::uint64_t x, std::uint64_t spf_cap);

}  // namespace rankstat::cache
