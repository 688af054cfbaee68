#include "rankstat/arith.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace rankstat::arith {

namespace {

constexpr u64 kTrialDivisionLimit = 1'000'000;
constexpr u64 kSmallPrimeCut = 256;

// Primes below kSmallPrimeCut, stripped before Pollard rho.
constexpr auto kSmallPrimes = [] {
  std::array<std::uint16_t, 54> out{};
  std::size_t n = 0;
  for (unsigned c = 2; c < kSmallPrimeCut; ++c) {
    bool prime = true;
    for (unsigned j = 2; j * j <= c; ++j) {
      if (c % j == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out[n++] = static_cast<std::uint16_t>(c);
  }
  return out;
}();

void require_in_range(u64 n) {
  if (n == 0) throw std::domain_error("argument must be positive");
  if (n > kWorkingBound) throw std::range_error("argument exceeds the 63-bit working bound");
}

bool miller_rabin_witness(u64 n, u64 a, u64 d, unsigned s) {
  u64 x = pow_mod(a % n, d, n);
  if (x == 1 || x == n - 1) return false;
  for (unsigned i = 1; i < s; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

// Brent's variant of Pollard rho; n is odd, composite, and has no factor
// below kSmallPrimeCut.
u64 pollard_brent(u64 n) {
  for (u64 c = 1;; ++c) {
    auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    constexpr u64 kBatch = 128;
    for (u64 r = 1; g == 1; r <<= 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      for (u64 k = 0; k < r && g == 1; k += kBatch) {
        ys = y;
        for (u64 i = 0; i < std::min(kBatch, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = gcd(q, n);
      }
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void collect_factors(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_brent(n);
  collect_factors(d, out);
  collect_factors(n / d, out);
}

std::vector<PrimePower> merge_sorted(std::vector<u64>& primes) {
  std::sort(primes.begin(), primes.end());
  std::vector<PrimePower> out;
  for (u64 p : primes) {
    if (!out.empty() && out.back().prime == p) {
      ++out.back().exponent;
    } else {
      out.push_back({p, 1});
    }
  }
  return out;
}

}  // namespace

Factorization::Factorization(std::vector<PrimePower> factors) : factors_(std::move(factors)) {
  u64 value = 1;
  u64 prev = 0;
  for (const auto& [p, e] : factors_) {
    if (e == 0) throw std::invalid_argument("factorization exponent must be >= 1");
    if (p <= prev) throw std::invalid_argument("factorization primes must be strictly increasing");
    if (!is_prime(p)) throw std::invalid_argument("factorization entry is not prime");
    value = checked_mul(value, checked_pow(p, e));
    prev = p;
  }
  value_ = value;
}

Factorization from_sorted_factors(std::vector<PrimePower> factors) {
  u64 value = 1;
  for (const auto& [p, e] : factors) {
    for (unsigned i = 0; i < e; ++i) value *= p;
  }
  return Factorization(Factorization::Trusted{}, value, std::move(factors));
}

unsigned Factorization::exponent_of(u64 prime) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), prime,
                             [](const PrimePower& pp, u64 v) { return pp.prime < v; });
  return it != factors_.end() && it->prime == prime ? it->exponent : 0;
}

bool Factorization::squarefree() const {
  return std::all_of(factors_.begin(), factors_.end(),
                     [](const PrimePower& pp) { return pp.exponent == 1; });
}

u64 pow_mod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 gcd(u64 a, u64 b) { return std::gcd(a, b); }

u64 checked_mul(u64 a, u64 b) {
  u64 out = 0;
  if (__builtin_mul_overflow(a, b, &out) || out > kWorkingBound) {
    throw std::range_error("product exceeds the 63-bit working bound");
  }
  return out;
}

u64 checked_pow(u64 base, unsigned exp) {
  u64 out = 1;
  for (unsigned i = 0; i < exp; ++i) out = checked_mul(out, base);
  return out;
}

u64 lcm(u64 a, u64 b) {
  if (a == 0 || b == 0) return 0;
  return checked_mul(a / gcd(a, b), b);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < kSmallPrimeCut * kSmallPrimeCut) return true;
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This witness set is deterministic for all n < 3.3e24.
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (miller_rabin_witness(n, a, d, s)) return false;
  }
  return true;
}

Factorization factorize(u64 n) {
  require_in_range(n);
  std::vector<PrimePower> out;
  u64 m = n;
  auto strip = [&](u64 p) {
    if (m % p != 0) return;
    unsigned e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    out.push_back({p, e});
  };

  if (n <= kTrialDivisionLimit) {
    strip(2);
    for (u64 p = 3; p * p <= m; p += 2) strip(p);
    if (m > 1) out.push_back({m, 1});
    return from_sorted_factors(std::move(out));
  }

  for (u64 p : kSmallPrimes) strip(p);
  if (m == 1) return from_sorted_factors(std::move(out));

  std::vector<u64> large;
  collect_factors(m, large);
  auto merged = merge_sorted(large);
  out.insert(out.end(), merged.begin(), merged.end());
  return from_sorted_factors(std::move(out));
}

u64 euler_phi(const Factorization& f) {
  u64 out = 1;
  for (const auto& [p, e] : f.factors()) {
    out *= p - 1;
    for (unsigned i = 1; i < e; ++i) out *= p;
  }
  return out;
}

u64 euler_phi(u64 n) { return euler_phi(factorize(n)); }

u64 carmichael_lambda(const Factorization& f) {
  u64 out = 1;
  for (const auto& [p, e] : f.factors()) {
    u64 part = 0;
    if (p == 2) {
      part = e <= 2 ? (u64{1} << (e - 1)) : (u64{1} << (e - 2));
    } else {
      part = p - 1;
      for (unsigned i = 1; i < e; ++i) part *= p;
    }
    out = std::lcm(out, part);
  }
  return out;
}

u64 carmichael_lambda(u64 n) { return carmichael_lambda(factorize(n)); }

namespace {

// Strips prime factors from a known multiple of the order.
u64 reduce_order(u64 a, u64 n, u64 multiple, const Factorization& multiple_factors) {
  u64 order = multiple;
  for (const auto& [l, e] : multiple_factors.factors()) {
    for (unsigned i = 0; i < e; ++i) {
      if (pow_mod(a, order / l, n) != 1) break;
      order /= l;
    }
  }
  return order;
}

}  // namespace

u64 order_mod(u64 a, const Factorization& n_factors) {
  const u64 n = n_factors.value();
  if (n == 1) return 1;
  a %= n;
  if (gcd(a, n) != 1) throw std::domain_error("order undefined: base and modulus share a factor");
  const u64 lambda = carmichael_lambda(n_factors);
  return reduce_order(a, n, lambda, factorize(lambda));
}

u64 order_mod_prime(u64 a, u64 r, const Factorization& r_minus_one) {
  a %= r;
  if (a == 0) throw std::domain_error("order undefined: base divisible by the prime modulus");
  return reduce_order(a, r, r - 1, r_minus_one);
}

OrderRecord mult_order(u64 a, const Factorization& n) {
  if (a < 2) throw std::domain_error("mult_order: base must be >= 2");
  if (gcd(a, n.value()) != 1) {
    throw std::domain_error("mult_order: base and modulus are not coprime");
  }
  return {a, n.value(), order_mod(a, n)};
}

OrderRecord mult_order(u64 a, u64 n) {
  require_in_range(n);
  if (a < 2) throw std::domain_error("mult_order: base must be >= 2");
  if (gcd(a, n) != 1) throw std::domain_error("mult_order: base and modulus are not coprime");
  return mult_order(a, factorize(n));
}

unsigned valuation(u64 l, u64 n) {
  if (!is_prime(l)) throw std::domain_error("valuation: l must be prime");
  if (n == 0) throw std::domain_error("valuation: n must be positive");
  unsigned e = 0;
  while (n % l == 0) {
    n /= l;
    ++e;
  }
  return e;
}

std::vector<Factorization> divisor_factorizations(const Factorization& f) {
  std::vector<std::pair<u64, std::vector<PrimePower>>> acc{{1, {}}};
  for (const auto& [p, e] : f.factors()) {
    const std::size_t base = acc.size();
    for (std::size_t i = 0; i < base; ++i) {
      u64 v = acc[i].first;
      for (unsigned j = 1; j <= e; ++j) {
        v *= p;
        auto fs = acc[i].second;
        fs.push_back({p, j});
        acc.emplace_back(v, std::move(fs));
      }
    }
  }
  std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Factorization> out;
  out.reserve(acc.size());
  for (auto& [v, fs] : acc) out.push_back(from_sorted_factors(std::move(fs)));
  return out;
}

std::vector<u64> divisors(const Factorization& f) {
  std::vector<u64> out{1};
  for (const auto& [p, e] : f.factors()) {
    const std::size_t base = out.size();
    for (std::size_t i = 0; i < base; ++i) {
      u64 v = out[i];
      for (unsigned j = 1; j <= e; ++j) {
        v *= p;
        out.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int legendre_symbol(i64 u, u64 p) {
  if (p == 2 || !is_prime(p)) throw std::domain_error("legendre_symbol: p must be an odd prime");
  const i64 sp = static_cast<i64>(p);
  const u64 r = static_cast<u64>(((u % sp) + sp) % sp);
  if (r == 0) return 0;
  return pow_mod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

u64 lcm_upto(u64 y) {
  if (y == 0) throw std::domain_error("lcm_upto: y must be >= 1");
  u64 out = 1;
  for (u64 l = 2; l <= y; ++l) {
    if (!is_prime(l)) continue;
    u64 pw = l;
    while (pw <= y / l) pw *= l;
    out = checked_mul(out, pw);
  }
  return out;
}

std::optional<PrimePower> as_prime_power(u64 q) {
  if (q < 2 || q > kWorkingBound) return std::nullopt;
  const Factorization f = factorize(q);
  if (f.size() != 1) return std::nullopt;
  return f.factors()[0];
}

}  // namespace rankstat::arith
