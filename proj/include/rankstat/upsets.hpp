#pragma once

// Divisor sets attached to the sequence p^n + 1.
//
//   R_{p,k}  odd primes r != p with v_2(ord_p(r)) = k
//   R_p      R_{p,1} for odd p, R_{2,2} for p = 2
//   U_p      integers dividing some p^n + 1; equals the union of U_{p,k}
//   Q_{p,m}  primes of R_p congruent to 1 mod m
//
// plus the Kummer field degree [Q(zeta_n, a^(1/d)) : Q] and the splitting
// count varpi_p(x; n, d).

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include "rankstat/arith.hpp"
#include "rankstat/sieve.hpp"

namespace rankstat::upsets {

using arith::u64;

struct PrimeClass {
  u64 p = 0;
  u64 r = 0;
  /// v_2(ord_p(r)); zero means r lies in no R_{p,k}.
  unsigned k = 0;
};

enum class Rejection { SharesFactorWithP, MixedK, ExcessiveTwoPart, OddOrderObstruction };

std::string_view to_string(Rejection r);

struct UpClassification {
  u64 p = 0;
  u64 d = 0;
  bool member = false;
  /// Class index; set for members (1 for powers of two, including d = 1).
  std::optional<unsigned> k;
  /// Least n >= 1 with d | p^n + 1, for members.
  std::optional<u64> witness_exponent;
  std::optional<Rejection> rejection;
};

/// Throws std::domain_error unless r is an odd prime different from p
/// (and p is prime).
PrimeClass classify_prime(u64 p, u64 r);
/// Same as classify_prime, given the factorization of r - 1.
unsigned prime_class_index(u64 p, u64 r, const arith::Factorization& r_minus_one);

bool in_R_p(u64 p, u64 r);
/// Target class index of R_p: 2 when p = 2, else 1.
inline unsigned rp_class(u64 p) { return p == 2 ? 2 : 1; }

/// Class index of an odd prime r != p; callers supply it from a table or
/// compute it on demand.
using ClassLookup = std::function<unsigned(u64 r)>;

/// Membership verdict from the factorization alone (no witness exponent).
UpClassification structural_verdict(u64 p, const arith::Factorization& d, const ClassLookup& class_of);

/// Full classification, including the minimal witness exponent.
UpClassification classify_up(u64 p, u64 d);
UpClassification classify_up(u64 p, const arith::Factorization& d, const ClassLookup& class_of);

/// Membership directly from the definition via the order of p mod d.
bool member_up_direct_oracle(u64 p, u64 d);

/// r in Q_{p,m}. m must be odd and coprime to p; r must be prime.
bool in_Q_pm(u64 p, u64 m, u64 r);

/// [Q(zeta_n, a^(1/d)) : Q] for |a| > 1, d | n and gcd(d, h) = 1 where h is
/// the largest integer with a an h-th power.
u64 kummer_degree_general(arith::i64 a, u64 n, u64 d);
/// The a = p prime case.
u64 kummer_degree(u64 p, u64 n, u64 d);

/// Number of primes r <= x with r = 1 (mod n), r != p and d | (r-1)/ord_p(r).
/// The table must cover x.
u64 varpi_count(u64 p, u64 x, u64 n, u64 d, const stats::PrimeTable& primes);

/// Precomputed class index k for the first `count` primes of a table,
/// indexed by position. Entries for r = 2 and r = p are zero.
std::vector<std::uint8_t> class_table(u64 p, const stats::PrimeTable& primes, unsigned threads = 1,
                                      std::size_t count = SIZE_MAX);

}  // namespace rankstat::upsets
