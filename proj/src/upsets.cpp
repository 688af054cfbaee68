#include "rankstat/upsets.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "rankstat/parallel.hpp"

namespace rankstat::upsets {

using arith::Factorization;

namespace {

void require_prime(u64 p, const char* what) {
  if (!arith::is_prime(p)) throw std::domain_error(std::string(what) + ": p must be prime");
}

void require_odd_prime_other_than(u64 p, u64 r) {
  if (r == 2 || !arith::is_prime(r)) throw std::domain_error("r must be an odd prime");
  if (r == p) throw std::domain_error("r must differ from p");
}

unsigned class_on_demand(u64 p, u64 r) {
  return prime_class_index(p, r, arith::factorize(r - 1));
}

}  // namespace

std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::SharesFactorWithP: return "shares-factor-with-p";
    case Rejection::MixedK: return "mixed-k";
    case Rejection::ExcessiveTwoPart: return "excessive-two-part";
    case Rejection::OddOrderObstruction: return "odd-order-obstruction";
  }
  return "unknown";
}

unsigned prime_class_index(u64 p, u64 r, const Factorization& r_minus_one) {
  return arith::v2(arith::order_mod_prime(p, r, r_minus_one));
}

PrimeClass classify_prime(u64 p, u64 r) {
  require_prime(p, "classify_prime");
  require_odd_prime_other_than(p, r);
  return {p, r, class_on_demand(p, r)};
}

bool in_R_p(u64 p, u64 r) { return classify_prime(p, r).k == rp_class(p); }

UpClassification structural_verdict(u64 p, const Factorization& d, const ClassLookup& class_of) {
  UpClassification out;
  out.p = p;
  out.d = d.value();
  auto reject = [&](Rejection why) {
    out.member = false;
    out.rejection = why;
    return out;
  };

  if (d.value() == 1) {
    out.member = true;
    out.k = 1;
    return out;
  }
  if (d.value() % p == 0) return reject(Rejection::SharesFactorWithP);

  std::optional<unsigned> k;
  bool mixed = false;
  for (const auto& [r, e] : d.factors()) {
    if (r == 2) continue;
    const unsigned kr = class_of(r);
    if (kr == 0) return reject(Rejection::OddOrderObstruction);
    if (k && *k != kr) mixed = true;
    if (!k) k = kr;
  }
  if (mixed) return reject(Rejection::MixedK);
  const unsigned cls = k.value_or(1);

  if (p > 2) {
    const unsigned two = d.exponent_of(2);
    const unsigned allowed = cls == 1 ? arith::v2(p + 1) : 1;
    if (two > allowed) return reject(Rejection::ExcessiveTwoPart);
  }
  out.member = true;
  out.k = cls;
  return out;
}

UpClassification classify_up(u64 p, const Factorization& d, const ClassLookup& class_of) {
  UpClassification out = structural_verdict(p, d, class_of);
  if (!out.member) return out;
  if (d.value() <= 2) {
    out.witness_exponent = 1;
    return out;
  }
  // p^n = -1 (mod d) forces n to be an odd multiple of ord/2, so the least
  // witness is ord/2 whenever one exists.
  const u64 ord = arith::order_mod(p, d);
  if (ord % 2 != 0 || arith::pow_mod(p, ord / 2, d.value()) != d.value() - 1) {
    throw std::logic_error("classify_up: structural member without a witness exponent");
  }
  out.witness_exponent = ord / 2;
  return out;
}

UpClassification classify_up(u64 p, u64 d) {
  require_prime(p, "classify_up");
  return classify_up(p, arith::factorize(d), [p](u64 r) { return class_on_demand(p, r); });
}

bool member_up_direct_oracle(u64 p, u64 d) {
  require_prime(p, "member_up_direct_oracle");
  if (d == 0) throw std::domain_error("member_up_direct_oracle: d must be positive");
  if (d == 1) return true;
  if (d == 2) return p % 2 == 1;
  if (arith::gcd(d, p) != 1) return false;
  const u64 ord = arith::mult_order(p, d).order;
  return ord % 2 == 0 && arith::pow_mod(p, ord / 2, d) == d - 1;
}

bool in_Q_pm(u64 p, u64 m, u64 r) {
  require_prime(p, "in_Q_pm");
  if (m == 0 || m % 2 == 0) throw std::domain_error("in_Q_pm: m must be odd and positive");
  if (m % p == 0) throw std::domain_error("in_Q_pm: m must be coprime to p");
  if (!arith::is_prime(r)) throw std::domain_error("in_Q_pm: r must be prime");
  if (r == 2 || r == p) return false;
  return r % m == 1 % m && in_R_p(p, r);
}

u64 kummer_degree_general(arith::i64 a, u64 n, u64 d) {
  if (a > -2 && a < 2) throw std::domain_error("kummer_degree: |a| must exceed 1");
  if (n == 0 || d == 0 || n % d != 0) throw std::domain_error("kummer_degree: d must divide n");
  const u64 abs_a = a < 0 ? static_cast<u64>(-(a + 1)) + 1 : static_cast<u64>(a);
  const Factorization fa = arith::factorize(abs_a);

  u64 g = 0;
  for (const auto& [q, e] : fa.factors()) g = arith::gcd(g, e);
  u64 h = g;
  if (a < 0) {
    while (h % 2 == 0) h /= 2;
  }
  if (arith::gcd(d, h) != 1) throw std::domain_error("kummer_degree: gcd(d, h) must be 1");

  // a = a1 * a2^2 with a1 squarefree, carrying the sign of a.
  u64 abs_a1 = 1;
  for (const auto& [q, e] : fa.factors()) {
    if (e % 2 == 1) abs_a1 *= q;
  }
  const arith::i64 a1 = a < 0 ? -static_cast<arith::i64>(abs_a1) : static_cast<arith::i64>(abs_a1);
  const bool a1_one_mod_4 = ((a1 % 4) + 4) % 4 == 1;

  const u64 full = arith::checked_mul(d, arith::euler_phi(n));
  const bool halves = d % 2 == 0 &&
                      ((a1_one_mod_4 && n % abs_a1 == 0) || (!a1_one_mod_4 && n % (4 * abs_a1) == 0));
  return halves ? full / 2 : full;
}

u64 kummer_degree(u64 p, u64 n, u64 d) {
  require_prime(p, "kummer_degree");
  return kummer_degree_general(static_cast<arith::i64>(p), n, d);
}

u64 varpi_count(u64 p, u64 x, u64 n, u64 d, const stats::PrimeTable& primes) {
  require_prime(p, "varpi_count");
  if (n == 0 || d == 0 || n % d != 0) throw std::domain_error("varpi_count: d must divide n");
  if (primes.limit() < x) throw std::range_error("varpi_count: prime table does not cover x");
  u64 count = 0;
  for (u64 r : primes.primes()) {
    if (r > x) break;
    if (r == p || (r - 1) % n != 0) continue;
    const u64 ord = arith::order_mod_prime(p, r, primes.factorize(r - 1));
    if (((r - 1) / ord) % d == 0) ++count;
  }
  return count;
}

std::vector<std::uint8_t> class_table(u64 p, const stats::PrimeTable& primes, unsigned threads,
                                      std::size_t count) {
  require_prime(p, "class_table");
  const auto all = primes.primes();
  const auto ps = all.first(std::min(count, all.size()));
  std::vector<std::uint8_t> out(ps.size(), 0);
  parallel_chunks(ps.size(), threads, 1 << 14, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const u64 r = ps[i];
      if (r == 2 || r == p) continue;
      out[i] = static_cast<std::uint8_t>(prime_class_index(p, r, primes.factorize(r - 1)));
    }
  });
  return out;
}

}  // namespace rankstat::upsets
