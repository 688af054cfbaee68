#include "rankstat/stats.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

#include "rankstat/parallel.hpp"
#include "rankstat/ulmer.hpp"
#include "rankstat/upsets.hpp"

namespace rankstat::stats {

namespace {

constexpr std::size_t kChunk = 1 << 14;

void require_prime(u64 p) {
  if (!arith::is_prime(p)) throw std::domain_error("p must be prime");
}

void require_cover(const PrimeTable& primes, u64 x) {
  if (primes.limit() < x) throw std::range_error("prime table does not cover x");
}

void warn_if_p_large(CensusReport& report) {
  const double bound = std::pow(log_nu(static_cast<double>(report.x), 1), 2.0 / 3.0);
  if (static_cast<double>(report.p) > bound) {
    report.warnings.push_back("p exceeds (log x)^(2/3); the predicted densities are outside their stated range");
  }
}

CensusRow make_row(std::string label, u64 observed, std::optional<Rational> predicted, double baseline,
                   bool partition = true) {
  CensusRow row;
  row.label = std::move(label);
  row.observed = observed;
  row.predicted = predicted;
  row.ratio = static_cast<double>(observed) / baseline;
  if (predicted) row.deviation = std::abs(row.ratio - predicted->value());
  row.partition = partition;
  return row;
}

// Class lookup over a table's first `count` primes, falling back to a direct
// order computation for larger primes.
class ClassIndex {
 public:
  ClassIndex(u64 p, const PrimeTable& primes, std::size_t count, unsigned threads)
      : p_(p), primes_(primes.primes().first(std::min(count, primes.primes().size()))),
        classes_(upsets::class_table(p, primes, threads, count)) {}

  unsigned operator()(u64 r) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), r);
    if (it != primes_.end() && *it == r) return classes_[static_cast<std::size_t>(it - primes_.begin())];
    return upsets::classify_prime(p_, r).k;
  }

  std::uint8_t at(std::size_t i) const { return classes_[i]; }

 private:
  u64 p_;
  std::span<const std::uint32_t> primes_;
  std::vector<std::uint8_t> classes_;
};

std::size_t primes_upto(const PrimeTable& primes, u64 x) {
  return static_cast<std::size_t>(primes.count_upto(x));
}

}  // namespace

std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::PiOfX: return "pi-of-x";
    case Baseline::LiOfX: return "li-of-x";
    case Baseline::X: return "x";
    case Baseline::XOverLogTwoThirds: return "x-over-log-x-two-thirds";
  }
  return "unknown";
}

double log_nu(double x, unsigned nu) {
  double v = x;
  for (unsigned i = 0; i < std::max(nu, 1u); ++i) v = std::max(v > 0 ? std::log(v) : 1.0, 1.0);
  return v;
}

double li(double x) {
  if (!(x >= 2.0)) throw std::domain_error("li: x must be >= 2");
  if (x == 2.0) return 0.0;
  // t = e^u turns the integrand into e^u / u on [log 2, log x].
  auto f = [](double u) { return std::exp(u) / u; };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, std::log(2.0), std::log(x), 20, 1e-13, &error);
  return value;
}

CensusReport rpk_census(u64 p, u64 x, unsigned k_max, const PrimeTable& primes, CensusOptions opts) {
  require_prime(p);
  require_cover(primes, x);
  if (k_max < 2) throw std::domain_error("rpk_census: k_max must be >= 2");

  const std::size_t n = primes_upto(primes, x);
  const auto classes = upsets::class_table(p, primes, opts.threads, n);
  std::vector<u64> buckets(k_max + 2, 0);
  const auto ps = primes.primes();
  for (std::size_t i = 0; i < n; ++i) {
    if (ps[i] == 2 || ps[i] == p) continue;
    ++buckets[std::min<unsigned>(classes[i], k_max + 1)];
  }

  CensusReport report;
  report.label = "R_{" + std::to_string(p) + ",k}";
  report.p = p;
  report.x = x;
  report.baseline = Baseline::PiOfX;
  report.baseline_value = static_cast<double>(n);
  warn_if_p_large(report);
  if (n == 0) return report;

  const bool two = p == 2;
  const Rational complement = two ? Rational{7, 24} : Rational{1, 3};
  const Rational k1 = two ? Rational{7, 24} : Rational{1, 3};
  const Rational k2 = two ? Rational{1, 3} : Rational{1, 6};
  const Rational tail3 = two ? Rational{1, 12} : Rational{1, 6};
  const double base = report.baseline_value;

  report.rows.push_back(make_row("k=0 (complement)", buckets[0], complement, base));
  report.rows.push_back(make_row("k=1", buckets[1], k1, base));
  report.rows.push_back(make_row("k=2", buckets[2], k2, base));
  for (unsigned k = 3; k <= k_max; ++k) {
    report.rows.push_back(make_row("k=" + std::to_string(k), buckets[k], std::nullopt, base));
  }
  report.rows.push_back(make_row("k>" + std::to_string(k_max), buckets[k_max + 1], std::nullopt, base));
  u64 at_least_three = 0;
  for (unsigned k = 3; k <= k_max + 1; ++k) at_least_three += buckets[k];
  report.rows.push_back(make_row("k>=3", at_least_three, tail3, base, false));
  return report;
}

CensusReport qpm_census(u64 p, u64 m, u64 x, const PrimeTable& primes, CensusOptions opts) {
  require_prime(p);
  require_cover(primes, x);
  if (m == 0 || m % 2 == 0) throw std::domain_error("qpm_census: m must be odd and positive");
  if (m % p == 0) throw std::domain_error("qpm_census: m must be coprime to p");

  const std::size_t n = primes_upto(primes, x);
  const auto classes = upsets::class_table(p, primes, opts.threads, n);
  const unsigned target = upsets::rp_class(p);
  const auto ps = primes.primes();
  u64 count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ps[i] == 2 || ps[i] == p) continue;
    if (classes[i] == target && ps[i] % m == 1 % m) ++count;
  }

  CensusReport report;
  report.label = "Q_{" + std::to_string(p) + "," + std::to_string(m) + "}";
  report.p = p;
  report.x = x;
  report.baseline = Baseline::PiOfX;
  report.baseline_value = static_cast<double>(n);
  warn_if_p_large(report);
  const double m_bound = std::pow(log_nu(static_cast<double>(x), 1), 1.0 / 6.0) / log_nu(static_cast<double>(x), 2);
  if (static_cast<double>(m) > m_bound) {
    report.warnings.push_back("m exceeds (log x)^(1/6)/log log x; the predicted density is outside its stated range");
  }
  if (n == 0) return report;
  report.rows.push_back(
      make_row(report.label, count, Rational{1, 3 * arith::euler_phi(m)}, report.baseline_value));
  return report;
}

NpkReport npk_census(u64 p, u64 x, unsigned k, const PrimeTable& primes, CensusOptions opts) {
  require_prime(p);
  require_cover(primes, x);
  if (k == 0 || k > 40) throw std::domain_error("npk_census: k must be in [1, 40]");
  if (x < 2) throw std::domain_error("npk_census: x must be >= 2");

  const std::size_t n = primes_upto(primes, x);
  const auto classes = upsets::class_table(p, primes, opts.threads, n);
  const auto ps = primes.primes();
  NpkReport out;
  for (std::size_t i = 0; i < n; ++i) {
    if (ps[i] == 2 || ps[i] == p) continue;
    if (classes[i] == 1 && arith::v2(ps[i] - 1) == k) ++out.direct;
  }

  const u64 a = u64{1} << (k - 1);
  const u64 b = u64{1} << k;
  const u64 c = u64{1} << (k + 1);
  const auto signed_sum = static_cast<arith::i64>(upsets::varpi_count(p, x, b, a, primes)) -
                          static_cast<arith::i64>(upsets::varpi_count(p, x, b, b, primes)) -
                          static_cast<arith::i64>(upsets::varpi_count(p, x, c, a, primes)) +
                          static_cast<arith::i64>(upsets::varpi_count(p, x, c, b, primes));
  out.inclusion_exclusion = signed_sum < 0 ? 0 : static_cast<u64>(signed_sum);
  if (signed_sum < 0) throw std::logic_error("npk_census: negative inclusion-exclusion count");

  CensusReport& report = out.census;
  report.label = "N_{" + std::to_string(p) + "," + std::to_string(k) + "}";
  report.p = p;
  report.x = x;
  report.baseline = Baseline::LiOfX;
  report.baseline_value = li(static_cast<double>(x));
  warn_if_p_large(report);
  std::optional<Rational> predicted;
  if (p > 2) {
    predicted = Rational{1, u64{1} << (2 * k)};
  } else {
    report.warnings.push_back("p = 2: the Kummer degree halves for some moduli; 2^(-2k) is not the predicted density");
  }
  if (report.baseline_value > 0) {
    report.rows.push_back(make_row("direct", out.direct, predicted, report.baseline_value));
    report.rows.push_back(
        make_row("inclusion-exclusion", out.inclusion_exclusion, predicted, report.baseline_value, false));
  }
  return out;
}

std::vector<u64> up_members(u64 p, u64 x, const PrimeTable& primes, CensusOptions opts) {
  require_prime(p);
  require_cover(primes, x);
  const ClassIndex index(p, primes, primes_upto(primes, x), opts.threads);
  const std::size_t chunks = static_cast<std::size_t>((x + kChunk - 1) / kChunk);
  std::vector<std::vector<u64>> parts(chunks);
  parallel_chunks(static_cast<std::size_t>(x), opts.threads, kChunk, [&](std::size_t lo, std::size_t hi) {
    auto& part = parts[lo / kChunk];
    for (std::size_t i = lo; i < hi; ++i) {
      const u64 d = i + 1;
      if (upsets::structural_verdict(p, primes.factorize(d), index).member) part.push_back(d);
    }
  });
  std::vector<u64> out;
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

CensusReport up_census(u64 p, u64 x, const PrimeTable& primes, CensusOptions opts) {
  if (x == 0) throw std::domain_error("up_census: x must be positive");
  const auto members = up_members(p, x, primes, opts);
  CensusReport report;
  report.label = "U_" + std::to_string(p);
  report.p = p;
  report.x = x;
  report.baseline = Baseline::XOverLogTwoThirds;
  report.baseline_value = static_cast<double>(x) / std::pow(log_nu(static_cast<double>(x), 1), 2.0 / 3.0);
  report.rows.push_back(make_row(report.label, members.size(), std::nullopt, report.baseline_value));
  return report;
}

AverageRankReport average_rank_survey(u64 q, u64 x, const PrimeTable& primes, CensusOptions opts) {
  const auto fq = ulmer::FieldOrder::from(q);
  const auto members = up_members(fq.p, x, primes, opts);
  std::vector<u64> values(members.size(), 0);
  parallel_chunks(members.size(), opts.threads, 1 << 10, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) values[i] = ulmer::iq_value(q, primes.factorize(members[i]));
  });

  AverageRankReport r;
  r.q = q;
  r.p = fq.p;
  r.x = x;
  r.members = members.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    r.sum_iq += values[i];
    if (values[i] > r.max_iq) {
      r.max_iq = values[i];
      r.argmax_d = members[i];
    }
  }
  if (!values.empty()) {
    r.mean_iq = static_cast<double>(r.sum_iq) / static_cast<double>(values.size());
    auto sorted = values;
    std::sort(sorted.begin(), sorted.end());
    r.median_iq = sorted[(sorted.size() - 1) / 2];
    for (u64 upper = 1;; upper *= 2) {
      const auto lo_it = std::upper_bound(sorted.begin(), sorted.end(), upper / 2);
      const auto hi_it = std::upper_bound(sorted.begin(), sorted.end(), upper);
      r.histogram.push_back({upper, static_cast<u64>(hi_it - (upper == 1 ? sorted.begin() : lo_it))});
      if (upper >= sorted.back()) break;
    }
  }
  const double xd = static_cast<double>(std::max<u64>(x, 1));
  r.envelope = std::pow(xd, 1.0 - log_nu(xd, 3) / (2.0 * log_nu(xd, 2)));
  return r;
}

double truncated_h(const arith::Factorization& n, double bound) {
  double total = 0.0;
  for (u64 l = 2; static_cast<double>(l) <= bound; ++l) {
    if (!arith::is_prime(l)) continue;
    u64 v = 0;
    for (const auto& [r, e] : n.factors()) {
      u64 m = r - 1;
      while (m > 0 && m % l == 0) {
        m /= l;
        ++v;
      }
      if (r == l) v += e - 1;
    }
    total += static_cast<double>(v) * std::log(static_cast<double>(l));
  }
  return total;
}

UniformSampler::UniformSampler(u64 x, u64 seed) : x_(x), limit_(0), engine_(seed) {
  if (x == 0) throw std::domain_error("UniformSampler: x must be positive");
  limit_ = (0 - x) % x;  // 2^64 mod x
}

u64 UniformSampler::next() {
  u64 v = engine_();
  while (v < limit_) v = engine_();
  return v % x_ + 1;
}

NormalOrderReport normal_order_survey(u64 p, u64 x, u64 sample_size, u64 seed, const PrimeTable& primes,
                                      CensusOptions opts) {
  require_prime(p);
  if (x == 0) throw std::domain_error("normal_order_survey: x must be positive");
  if (sample_size == 0 || sample_size > x) throw std::domain_error("normal_order_survey: need 1 <= sample_size <= x");

  NormalOrderReport r;
  r.p = p;
  r.x = x;
  r.seed = seed;
  r.exhaustive = x <= kExhaustiveSurveyCutoff;
  r.y = log_nu(static_cast<double>(x), 2);
  r.l_bound = r.y * std::log(r.y);
  r.target = r.l_bound / 3.0;
  r.tolerance = r.y * log_nu(r.y, 2);

  std::vector<u64> ds;
  if (r.exhaustive) {
    require_cover(primes, x);
    ds.resize(x);
    for (u64 d = 1; d <= x; ++d) ds[d - 1] = d;
  } else {
    UniformSampler sampler(x, seed);
    ds.resize(sample_size);
    for (auto& d : ds) d = sampler.next();
  }

  const ClassIndex index(p, primes, primes.primes().size(), opts.threads);
  r.samples.resize(ds.size());
  parallel_chunks(ds.size(), opts.threads, kChunk, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto dp = ulmer::dp_of(p, primes.factorize(ds[i]), index);
      const u64 phi = arith::euler_phi(dp.d_p_factors);
      const u64 lambda = arith::carmichael_lambda(dp.d_p_factors);
      if (phi % lambda != 0) throw std::logic_error("phi(d_p)/lambda(d_p) is not integral");
      auto& s = r.samples[i];
      s.d = ds[i];
      s.d_p = dp.d_p;
      s.quotient = phi / lambda;
      s.ratio_log = std::log(static_cast<double>(s.quotient));
      s.h_p = truncated_h(dp.d_p_factors, r.l_bound);
    }
  });

  std::vector<double> logs, hs;
  logs.reserve(r.samples.size());
  hs.reserve(r.samples.size());
  u64 within = 0;
  double sum_log = 0.0, sum_h = 0.0;
  for (const auto& s : r.samples) {
    logs.push_back(s.ratio_log);
    hs.push_back(s.h_p);
    sum_log += s.ratio_log;
    sum_h += s.h_p;
    if (std::abs(s.h_p - r.target) <= r.tolerance) ++within;
  }
  const double count = static_cast<double>(r.samples.size());
  auto median = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  r.mean_ratio_log = sum_log / count;
  r.mean_h_p = sum_h / count;
  r.median_ratio_log = median(logs);
  r.median_h_p = median(hs);
  r.fraction_within = static_cast<double>(within) / count;
  return r;
}

}  // namespace rankstat::stats
