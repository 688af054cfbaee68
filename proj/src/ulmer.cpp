#include "rankstat/ulmer.hpp"

#include <cmath>
#include <stdexcept>

namespace rankstat::ulmer {

using arith::Factorization;

namespace {

u64 clip_minus_four(u64 v) { return v > 4 ? v - 4 : 0; }

template <class OnTerm>
u64 divisor_sum(u64 q, const Factorization& d, OnTerm&& on_term) {
  u64 total = 0;
  for (const Factorization& e : arith::divisor_factorizations(d)) {
    const u64 phi = arith::euler_phi(e);
    const u64 ord = arith::order_mod(q, e);
    if (phi % ord != 0) throw std::logic_error("I_q term is not integral");
    const u64 c = phi / ord;
    total += c;
    on_term(RankTerm{e.value(), phi, ord, c});
  }
  return total;
}

void require_coprime(u64 q, u64 d) {
  if (arith::gcd(q, d) != 1) throw std::domain_error("d must be coprime to q");
}

}  // namespace

FieldOrder FieldOrder::from(u64 q) {
  const auto pp = arith::as_prime_power(q);
  if (!pp) throw std::domain_error("q must be a prime power");
  return {q, pp->prime, pp->exponent};
}

std::string_view to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::ExactBracket: return "exact-bracket";
    case BoundMethod::DpLowerBound: return "dp-lower-bound";
    case BoundMethod::PhiOverLambda: return "phi-over-lambda";
  }
  return "unknown";
}

RankBracket iq(const FieldOrder& q, const Factorization& d) {
  require_coprime(q.q, d.value());
  RankBracket out;
  out.q = q.q;
  out.d = d.value();
  out.modulus = d.value();
  out.method = BoundMethod::ExactBracket;
  out.i_q = divisor_sum(q.q, d, [&](const RankTerm& t) { out.terms.push_back(t); });
  out.lower = clip_minus_four(out.i_q);
  out.upper = out.i_q;
  return out;
}

RankBracket iq(u64 q, u64 d) { return iq(FieldOrder::from(q), arith::factorize(d)); }

u64 iq_value(u64 q, const Factorization& d) {
  require_coprime(q, d.value());
  return divisor_sum(q, d, [](const RankTerm&) {});
}

u64 orbit_count_oracle(u64 q, u64 d) {
  if (d == 0) throw std::domain_error("orbit_count_oracle: d must be positive");
  if (d > kOrbitOracleBound) throw std::range_error("orbit_count_oracle: d above oracle scale");
  require_coprime(q, d);
  const u64 step = q % d;
  std::vector<char> seen(d, 0);
  u64 orbits = 0;
  for (u64 s = 0; s < d; ++s) {
    if (seen[s]) continue;
    ++orbits;
    for (u64 t = s; !seen[t]; t = arith::mul_mod(t, step, d)) seen[t] = 1;
  }
  return orbits;
}

DpDecomposition dp_of(u64 p, const Factorization& d, const upsets::ClassLookup& class_of) {
  DpDecomposition out;
  out.p = p;
  out.d = d.value();
  const unsigned target = upsets::rp_class(p);
  std::vector<arith::PrimePower> kept;
  for (const auto& [r, e] : d.factors()) {
    if (r == 2 || r == p) continue;
    const unsigned k = class_of(r);
    if (k != target) continue;
    out.support.push_back({r, e, k});
    kept.push_back({r, e});
  }
  out.d_p_factors = arith::from_sorted_factors(std::move(kept));
  out.d_p = out.d_p_factors.value();
  return out;
}

DpDecomposition dp_of(u64 p, u64 d) {
  if (!arith::is_prime(p)) throw std::domain_error("dp_of: p must be prime");
  return dp_of(p, arith::factorize(d), [p](u64 r) { return upsets::classify_prime(p, r).k; });
}

RankBracket rank_lower_bound(u64 q, u64 d) {
  const FieldOrder fq = FieldOrder::from(q);
  const DpDecomposition dp = dp_of(fq.p, d);
  RankBracket out = iq(fq, dp.d_p_factors);
  out.d = d;
  out.method = BoundMethod::DpLowerBound;
  out.upper.reset();
  return out;
}

RankBracket phi_over_lambda_bound(u64 q, u64 d) {
  const FieldOrder fq = FieldOrder::from(q);
  const DpDecomposition dp = dp_of(fq.p, d);
  const u64 phi = arith::euler_phi(dp.d_p_factors);
  const u64 lambda = arith::carmichael_lambda(dp.d_p_factors);
  if (phi % lambda != 0) throw std::logic_error("phi(d_p)/lambda(d_p) is not integral");
  RankBracket out;
  out.q = q;
  out.d = d;
  out.modulus = dp.d_p;
  out.method = BoundMethod::PhiOverLambda;
  out.i_q = phi / lambda;
  out.lower = clip_minus_four(out.i_q);
  return out;
}

double brumer_envelope(u64 p, u64 d) {
  if (!arith::is_prime(p)) throw std::domain_error("brumer_envelope: p must be prime");
  if (d < 2) throw std::domain_error("brumer_envelope: d must be >= 2");
  return static_cast<double>(d) * std::log(static_cast<double>(p)) /
         (2.0 * std::log(static_cast<double>(d)));
}

RankBracket best_bracket(u64 q, u64 d) {
  const FieldOrder fq = FieldOrder::from(q);
  if (upsets::classify_up(fq.p, d).member) return iq(fq, arith::factorize(d));
  return rank_lower_bound(q, d);
}

}  // namespace rankstat::ulmer
