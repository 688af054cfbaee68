#include "rankstat/construct.hpp"

#include <algorithm>
#include <cmath>

#include "rankstat/ulmer.hpp"

namespace rankstat::construct {

namespace {

// Rounds a real endpoint outward, snapping values within floating noise of
// an integer onto it first.
double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v)) ? r : v;
}
u64 floor_u(double v) { return static_cast<u64>(std::floor(snap(v))); }
u64 ceil_u(double v) { return static_cast<u64>(std::ceil(snap(v))); }

u64 largest_prime_power_divisor(u64 n) {
  u64 best = 1;
  const arith::Factorization f = arith::factorize(n);
  for (const auto& [l, e] : f.factors()) best = std::max(best, arith::checked_pow(l, e));
  return best;
}

}  // namespace

bool operator==(const ConstructionCertificate& a, const ConstructionCertificate& b) {
  return a.q == b.q && a.d == b.d && a.support == b.support && a.m_y == b.m_y && a.u == b.u &&
         a.support_congruent == b.support_congruent && a.up_class.member == b.up_class.member &&
         a.up_class.k == b.up_class.k && a.up_class.witness_exponent == b.up_class.witness_exponent &&
         a.up_class.rejection == b.up_class.rejection && a.order == b.order && a.lambda == b.lambda &&
         a.lambda_divides_m_y == b.lambda_divides_m_y && a.i_q == b.i_q && a.rank_lower == b.rank_lower &&
         a.weak_lower == b.weak_lower;
}

u64 select_u(u64 p) {
  if (!arith::is_prime(p)) throw std::domain_error("select_u: p must be prime");
  if (p == 2) return 5;
  const int want = p % 4 == 1 ? -1 : 1;
  for (u64 u = 3;; u += 4) {
    if (arith::legendre_symbol(static_cast<arith::i64>(u), p) == want) return u;
  }
}

ConstructionParams derive_params(const ConstructionSpec& spec) {
  const auto fq = ulmer::FieldOrder::from(spec.q);
  if (spec.delta.den == 0 || spec.delta.num == 0 || 12 * spec.delta.num >= spec.delta.den) {
    throw std::domain_error("delta must lie strictly between 0 and 1/12");
  }
  const double delta = spec.delta.value();

  ConstructionParams out;
  out.q = spec.q;
  out.p = fq.p;
  out.u = select_u(fq.p);
  out.modulus = 4 * fq.p;

  if (spec.mode == Mode::Derived) {
    if (spec.x < 3) throw std::domain_error("derived mode needs x >= 3");
    const double xd = static_cast<double>(spec.x);
    out.y = std::max<u64>(1, floor_u(stats::log_nu(xd, 1) / stats::log_nu(xd, 2)));
  } else {
    if (spec.y == 0) throw std::domain_error("direct mode needs y >= 1");
    out.y = spec.y;
  }
  out.m_y = arith::lcm_upto(out.y);
  out.z = std::pow(static_cast<double>(out.y), 2.0 / (1.0 - 2.0 * delta));
  out.interval_low = floor_u(std::pow(out.z, 0.5 - 2.0 * delta));
  out.interval_high = ceil_u(std::pow(out.z, 0.5 - delta));

  if (spec.mode == Mode::Derived) {
    out.z_low = ceil_u(out.z / 2.0);
    out.z_high = floor_u(out.z);
    if (out.z <= 1.0) throw std::domain_error("derived z must exceed 1");
    out.m = std::max<u64>(1, floor_u(std::log(static_cast<double>(spec.x)) / std::log(out.z)));
    if (spec.m) out.m = *spec.m;
    out.interval_filter = spec.interval_filter.value_or(true);
  } else {
    out.z_low = spec.z_low.value_or(ceil_u(out.z / 2.0));
    out.z_high = spec.z_high.value_or(floor_u(out.z));
    if (!spec.m || *spec.m == 0) throw std::domain_error("direct mode needs m >= 1");
    out.m = *spec.m;
    out.interval_filter = spec.interval_filter.value_or(false);
  }
  if (out.z_low > out.z_high) throw std::domain_error("empty prime window");
  return out;
}

QSearch find_Q(const ConstructionParams& params, const stats::PrimeTable& primes) {
  if (primes.limit() < params.z_high) throw std::range_error("find_Q: prime table does not cover the window");
  QSearch out;
  const auto ps = primes.primes();
  auto it = std::lower_bound(ps.begin(), ps.end(), params.z_low);
  for (; it != ps.end() && *it <= params.z_high; ++it) {
    const u64 r = *it;
    ++out.scanned;
    if (r % params.modulus != params.u % params.modulus) {
      ++out.failed_congruence;
      continue;
    }
    if (params.m_y % (r - 1) != 0) {
      ++out.failed_smoothness;
      continue;
    }
    if (params.interval_filter) {
      const u64 big = arith::factorize(r - 1).largest_prime();
      if (big < params.interval_low || big > params.interval_high) {
        ++out.failed_interval;
        continue;
      }
    }
    out.primes.push_back(r);
  }
  return out;
}

u64 covering_m_y(const std::vector<u64>& primes) {
  u64 y = 1;
  for (u64 r : primes) {
    if (r >= 2) y = std::max(y, largest_prime_power_divisor(r - 1));
  }
  return arith::lcm_upto(y);
}

ConstructionCertificate certify(u64 q, u64 d, u64 m_y) {
  const auto fq = ulmer::FieldOrder::from(q);
  if (d == 0 || m_y == 0) throw std::domain_error("certify: d and m_y must be positive");
  if (arith::gcd(d, q) != 1) throw std::domain_error("certify: d must be coprime to q");

  ConstructionCertificate c;
  c.q = q;
  c.d = d;
  c.m_y = m_y;
  c.u = select_u(fq.p);
  c.up_class = upsets::classify_up(fq.p, d);
  if (!c.up_class.member) {
    throw VerificationError("membership", std::to_string(d) + " is not in U_" + std::to_string(fq.p) + " (" +
                                              std::string(upsets::to_string(*c.up_class.rejection)) + ")");
  }
  const arith::Factorization f = arith::factorize(d);
  for (const auto& pp : f.factors()) c.support.push_back(pp.prime);
  const u64 modulus = 4 * fq.p;
  c.support_congruent = std::all_of(c.support.begin(), c.support.end(),
                                    [&](u64 r) { return r % modulus == c.u % modulus; });
  c.order = arith::order_mod(q, f);
  if (m_y % c.order != 0) {
    throw VerificationError("order-divides-m_y", "ord_q(d) = " + std::to_string(c.order) +
                                                     " does not divide " + std::to_string(m_y));
  }
  c.lambda = arith::carmichael_lambda(f);
  c.lambda_divides_m_y = m_y % c.lambda == 0;
  c.i_q = ulmer::iq_value(q, f);
  c.rank_lower = c.i_q > 4 ? c.i_q - 4 : 0;
  const u64 weak = arith::euler_phi(f) / c.order;
  c.weak_lower = weak > 4 ? weak - 4 : 0;
  return c;
}

std::vector<ConstructionCertificate> build_candidates(u64 q, std::vector<u64> Q, u64 m, u64 limit,
                                                      std::optional<u64> m_y) {
  if (m == 0) throw std::domain_error("build_candidates: m must be >= 1");
  std::sort(Q.begin(), Q.end());
  Q.erase(std::unique(Q.begin(), Q.end()), Q.end());
  if (Q.size() < m) throw InsufficientInputError(Q.size(), m);
  for (u64 r : Q) {
    if (!arith::is_prime(r)) throw std::domain_error("build_candidates: Q must contain primes");
  }
  const u64 bound = m_y.value_or(covering_m_y(Q));

  std::vector<ConstructionCertificate> out;
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  const std::size_t n = Q.size();
  while (out.size() < limit) {
    u64 d = 1;
    for (std::size_t i : idx) d = arith::checked_mul(d, Q[i]);
    out.push_back(certify(q, d, bound));

    // Advance to the next m-subset in lexicographic order.
    std::size_t i = m;
    while (i > 0 && idx[i - 1] == n - m + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace rankstat::construct
