#pragma once

// Rank data for E_d : y^2 + xy = x^3 - t^d over F_q(t).
//
// For d in U_p the rank equals I_q(d) - C_q(d) with 0 <= C_q(d) <= 4, where
//   I_q(d) = sum over e | d of phi(e) / ord_q(e).
// C_q(d) itself is not computed; results are certified brackets.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rankstat/arith.hpp"
#include "rankstat/upsets.hpp"

namespace rankstat::ulmer {

using arith::u64;

/// Size of a finite field: q = p^exponent with p prime.
struct FieldOrder {
  u64 q = 0;
  u64 p = 0;
  unsigned exponent = 0;

  /// Throws std::domain_error unless q is a prime power.
  static FieldOrder from(u64 q);
};

enum class BoundMethod { ExactBracket, DpLowerBound, PhiOverLambda };

std::string_view to_string(BoundMethod m);

struct RankTerm {
  u64 e = 0;
  u64 phi = 0;
  u64 order = 0;
  u64 contribution = 0;

  friend bool operator==(const RankTerm&, const RankTerm&) = default;
};

struct RankBracket {
  u64 q = 0;
  u64 d = 0;
  BoundMethod method = BoundMethod::ExactBracket;
  /// Modulus the bound is evaluated at: d for the exact bracket, d_p otherwise.
  u64 modulus = 0;
  /// I_q(modulus) for the divisor-sum methods; phi(d_p)/lambda(d_p) for
  /// the phi-over-lambda method.
  u64 i_q = 0;
  u64 lower = 0;
  /// Unset means no upper bound is certified.
  std::optional<u64> upper;
  std::vector<RankTerm> terms;
};

struct DpSupport {
  u64 r = 0;
  unsigned exponent = 0;
  unsigned k = 0;
};

struct DpDecomposition {
  u64 p = 0;
  u64 d = 0;
  u64 d_p = 1;
  std::vector<DpSupport> support;
  arith::Factorization d_p_factors;
};

/// Exact bracket [max(0, I - 4), I] with the term breakdown. The bracket is
/// a rank certificate only when d lies in U_p.
RankBracket iq(u64 q, u64 d);
RankBracket iq(const FieldOrder& q, const arith::Factorization& d);

/// I_q(d) without the breakdown.
u64 iq_value(u64 q, const arith::Factorization& d);

/// Number of orbits of x -> qx on Z/dZ; d <= kOrbitOracleBound.
inline constexpr u64 kOrbitOracleBound = 1'000'000;
u64 orbit_count_oracle(u64 q, u64 d);

DpDecomposition dp_of(u64 p, u64 d);
DpDecomposition dp_of(u64 p, const arith::Factorization& d, const upsets::ClassLookup& class_of);

/// max(0, I_q(d_p) - 4), valid for every d.
RankBracket rank_lower_bound(u64 q, u64 d);

/// max(0, phi(d_p)/lambda(d_p) - 4), valid for every d.
RankBracket phi_over_lambda_bound(u64 q, u64 d);

/// Main term d log p / (2 log d) of the general upper bound. Informational:
/// the error term is not computed.
double brumer_envelope(u64 p, u64 d);

/// The exact bracket when d is in U_p, otherwise the d_p lower bound.
RankBracket best_bracket(u64 q, u64 d);

}  // namespace rankstat::ulmer
