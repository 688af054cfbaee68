#pragma once

// High-rank construction: primes r = u (mod 4p) whose r - 1 divides M_y are
// multiplied m at a time. Every product lies in U_p and has ord_q(d) | M_y,
// so I_q(d) >= phi(d)/ord_q(d) is large and the bracket is certified.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankstat/arith.hpp"
#include "rankstat/sieve.hpp"
#include "rankstat/stats.hpp"
#include "rankstat/upsets.hpp"

namespace rankstat::construct {

using arith::u64;

enum class Mode { Derived, Direct };

struct ConstructionSpec {
  u64 q = 2;
  Mode mode = Mode::Direct;
  /// Target bound; derived mode only.
  u64 x = 0;
  /// Must lie strictly between 0 and 1/12.
  stats::Rational delta{1, 24};
  /// Smoothness bound; direct mode only.
  u64 y = 0;
  /// Direct-mode window; defaults to [ceil(z/2), floor(z)].
  std::optional<u64> z_low;
  std::optional<u64> z_high;
  /// Product arity; derived in derived mode, required in direct mode.
  std::optional<u64> m;
  /// Require P(r - 1) in I; defaults to on in derived mode.
  std::optional<bool> interval_filter;
};

/// Concrete integer parameters after derivation and rounding.
struct ConstructionParams {
  u64 q = 0;
  u64 p = 0;
  u64 u = 0;
  u64 modulus = 0;  // 4p
  u64 y = 0;
  u64 m_y = 0;
  double z = 0.0;
  u64 z_low = 0;
  u64 z_high = 0;
  u64 interval_low = 0;
  u64 interval_high = 0;
  bool interval_filter = false;
  u64 m = 0;
};

struct QSearch {
  std::vector<u64> primes;
  u64 scanned = 0;
  u64 failed_congruence = 0;
  u64 failed_smoothness = 0;
  u64 failed_interval = 0;
};

struct ConstructionCertificate {
  u64 q = 0;
  u64 d = 0;
  std::vector<u64> support;
  u64 m_y = 0;
  u64 u = 0;
  /// Every support prime is congruent to u mod 4p.
  bool support_congruent = false;
  upsets::UpClassification up_class;
  u64 order = 0;
  u64 lambda = 0;
  bool lambda_divides_m_y = false;
  u64 i_q = 0;
  u64 rank_lower = 0;
  /// max(0, phi(d)/ord_q(d) - 4), the weaker bound, for comparison.
  u64 weak_lower = 0;

  friend bool operator==(const ConstructionCertificate& a, const ConstructionCertificate& b);
};

class VerificationError : public std::runtime_error {
 public:
  VerificationError(std::string clause, const std::string& detail)
      : std::runtime_error(clause + ": " + detail), clause_(std::move(clause)) {}
  const std::string& clause() const { return clause_; }

 private:
  std::string clause_;
};

class InsufficientInputError : public std::runtime_error {
 public:
  InsufficientInputError(u64 available, u64 needed)
      : std::runtime_error("need " + std::to_string(needed) + " primes, have " + std::to_string(available)),
        available_(available) {}
  u64 available() const { return available_; }

 private:
  u64 available_;
};

/// 5 for p = 2; otherwise the least u = 3 (mod 4) such that every prime
/// r = u (mod 4p) lies in R_p: (u/p) = -1 when p = 1 (mod 4), and
/// (u/p) = +1 when p = 3 (mod 4).
u64 select_u(u64 p);

ConstructionParams derive_params(const ConstructionSpec& spec);

/// The table must cover params.z_high.
QSearch find_Q(const ConstructionParams& params, const stats::PrimeTable& primes);

/// Smallest M_y divisible by every r - 1, r in primes.
u64 covering_m_y(const std::vector<u64>& primes);

/// Up to `limit` m-subsets of Q in lexicographic order, each certified.
/// m_y defaults to covering_m_y(Q).
std::vector<ConstructionCertificate> build_candidates(u64 q, std::vector<u64> Q, u64 m, u64 limit,
                                                      std::optional<u64> m_y = std::nullopt);

/// Recomputes every certificate field from (q, d, m_y). Throws
/// VerificationError when d is outside U_p or ord_q(d) does not divide m_y.
ConstructionCertificate certify(u64 q, u64 d, u64 m_y);

}  // namespace rankstat::construct
