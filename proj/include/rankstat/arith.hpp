#pragma once

// Exact 64-bit integer arithmetic: factorization, totient, Carmichael
// function, multiplicative order, valuations, divisors, Legendre symbol.
//
// All inputs are confined to [1, kWorkingBound]. Modular products are
// carried out in 128-bit intermediates, so every routine is exact over the
// whole working range.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace rankstat::arith {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline constexpr u64 kWorkingBound = (u64{1} << 63) - 1;

struct PrimePower {
  u64 prime = 0;
  unsigned exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Canonical prime factorization of a positive integer: strictly increasing
/// primes, every exponent >= 1, product equal to value(). The empty list
/// represents 1.
class Factorization {
 public:
  Factorization() = default;

  /// Validates the invariants and throws std::invalid_argument on violation.
  explicit Factorization(std::vector<PrimePower> factors);

  u64 value() const { return value_; }
  std::span<const PrimePower> factors() const { return factors_; }
  bool empty() const { return factors_.empty(); }
  std::size_t size() const { return factors_.size(); }

  /// v_l(n); zero when l does not divide n.
  unsigned exponent_of(u64 prime) const;

  /// P(n): largest prime factor, with P(1) = 1.
  u64 largest_prime() const { return factors_.empty() ? 1 : factors_.back().prime; }

  bool squarefree() const;

  friend bool operator==(const Factorization&, const Factorization&) = default;

 private:
  struct Trusted {};
  Factorization(Trusted, u64 value, std::vector<PrimePower> factors)
      : value_(value), factors_(std::move(factors)) {}

  friend Factorization from_sorted_factors(std::vector<PrimePower> factors);

  u64 value_ = 1;
  std::vector<PrimePower> factors_;
};

/// Builds a Factorization from factors already known to be prime, sorted
/// and merged. Skips the primality re-check; used by the hot paths.
Factorization from_sorted_factors(std::vector<PrimePower> factors);

struct OrderRecord {
  u64 base = 0;
  u64 modulus = 1;
  u64 order = 1;
};

// Modular primitives.
inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}
u64 pow_mod(u64 base, u64 exp, u64 m);
u64 gcd(u64 a, u64 b);
/// Throws std::range_error when the result exceeds the working bound.
u64 lcm(u64 a, u64 b);
/// Checked product; throws std::range_error on overflow of the working bound.
u64 checked_mul(u64 a, u64 b);
/// Checked power; throws std::range_error on overflow of the working bound.
u64 checked_pow(u64 base, unsigned exp);

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(u64 n);

Factorization factorize(u64 n);

u64 euler_phi(const Factorization& f);
u64 euler_phi(u64 n);

u64 carmichael_lambda(const Factorization& f);
u64 carmichael_lambda(u64 n);

/// Order of an arbitrary residue a modulo n (gcd(a, n) = 1, a may exceed n).
/// n_factors must be the factorization of n.
u64 order_mod(u64 a, const Factorization& n_factors);

/// Multiplicative order of a >= 2 modulo n; throws std::domain_error when
/// gcd(a, n) != 1 or a < 2.
OrderRecord mult_order(u64 a, u64 n);
OrderRecord mult_order(u64 a, const Factorization& n);

/// Order modulo a prime r, given the factorization of r - 1.
u64 order_mod_prime(u64 a, u64 r, const Factorization& r_minus_one);

/// l-adic valuation; throws std::domain_error when l is not prime or n == 0.
unsigned valuation(u64 l, u64 n);

inline unsigned v2(u64 n) { return n == 0 ? 0 : static_cast<unsigned>(__builtin_ctzll(n)); }

/// All divisors in ascending order.
std::vector<u64> divisors(const Factorization& f);

/// All divisors together with their factorizations, ascending by value.
std::vector<Factorization> divisor_factorizations(const Factorization& f);

/// Legendre symbol (u/p) by Euler's criterion; p must be an odd prime.
int legendre_symbol(i64 u, u64 p);

/// M_y = lcm(1, ..., y). y >= 1; throws std::range_error on overflow.
u64 lcm_upto(u64 y);

/// If q = p^k for a prime p, returns {p, k}.
std::optional<PrimePower> as_prime_power(u64 q);

}  // namespace rankstat::arith
