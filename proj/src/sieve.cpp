#include "rankstat/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rankstat::stats {

PrimeTable::PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes,
                       std::vector<std::uint32_t> spf)
    : limit_(limit), primes_(std::move(primes)), spf_(std::move(spf)) {}

std::uint64_t PrimeTable::count_upto(std::uint64_t v) const {
  return static_cast<std::uint64_t>(std::upper_bound(primes_.begin(), primes_.end(), v) - primes_.begin());
}

arith::Factorization PrimeTable::factorize(std::uint64_t n) const {
  if (n == 0 || n > spf_limit()) return arith::factorize(n);
  std::vector<arith::PrimePower> out;
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  return arith::from_sorted_factors(std::move(out));
}

std::vector<std::uint32_t> build_spf(std::uint64_t n) {
  std::vector<std::uint32_t> spf(n + 1, 0);
  std::vector<std::uint32_t> primes;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes) {
      if (p > spf[i] || i * p > n) break;
      spf[i * p] = p;
    }
  }
  return spf;
}

PrimeTable sieve_primes(std::uint64_t x, std::uint64_t spf_cap) {
  if (x > kSieveCap) throw std::range_error("sieve_primes: x exceeds the sieve cap");
  std::vector<std::uint32_t> primes;
  if (x >= 2) {
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x))) + 1;
    std::vector<char> small(root + 1, 1);
    std::vector<std::uint32_t> base;
    for (std::uint64_t i = 2; i <= root; ++i) {
      if (!small[i]) continue;
      base.push_back(static_cast<std::uint32_t>(i));
      for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
    }
    constexpr std::uint64_t kSegment = 1 << 18;
    std::vector<char> seg(kSegment);
    for (std::uint64_t lo = 2; lo <= x; lo += kSegment) {
      const std::uint64_t hi = std::min(x, lo + kSegment - 1);
      std::fill(seg.begin(), seg.end(), 1);
      for (std::uint64_t p : base) {
        if (p * p > hi) break;
        std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
        for (std::uint64_t j = start; j <= hi; j += p) seg[j - lo] = 0;
      }
      for (std::uint64_t v = lo; v <= hi; ++v) {
        if (seg[v - lo]) primes.push_back(static_cast<std::uint32_t>(v));
      }
    }
  }
  std::vector<std::uint32_t> spf;
  if (spf_cap > 0) spf = build_spf(std::min(x, spf_cap));
  return PrimeTable(x, std::move(primes), std::move(spf));
}

}  // namespace rankstat::stats
