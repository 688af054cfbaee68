#pragma once

// Prime tables shared by the censuses. A table is built once and then read
// concurrently; nothing in it is mutated after construction.

#include <cstdint>
#include <span>
#include <vector>

#include "rankstat/arith.hpp"

namespace rankstat::stats {

inline constexpr std::uint64_t kSieveCap = 100'000'000;
inline constexpr std::uint64_t kDefaultSpfCap = 20'000'000;

class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes, std::vector<std::uint32_t> spf);

  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint32_t> primes() const { return primes_; }
  /// Smallest-prime-factor table indexed by n; empty when not materialized.
  std::span<const std::uint32_t> spf() const { return spf_; }
  std::uint64_t spf_limit() const { return spf_.empty() ? 0 : spf_.size() - 1; }

  /// pi(v) for v <= limit().
  std::uint64_t count_upto(std::uint64_t v) const;

  /// Uses the SPF table when n is covered, otherwise falls back to
  /// arith::factorize.
  arith::Factorization factorize(std::uint64_t n) const;

  friend bool operator==(const PrimeTable&, const PrimeTable&) = default;

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> primes_;
  std::vector<std::uint32_t> spf_;
};

/// Exact ascending primes <= x by a segmented sieve. When spf_cap > 0 a
/// smallest-prime-factor table is also built for n <= min(x, spf_cap).
/// Throws std::range_error for x > kSieveCap.
PrimeTable sieve_primes(std::uint64_t x, std::uint64_t spf_cap = 0);

/// Smallest-prime-factor table for 0..n (entries 0 and 1 are zero).
std::vector<std::uint32_t> build_spf(std::uint64_t n);

}  // namespace rankstat::stats
