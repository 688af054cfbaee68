#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rankstat/sieve.hpp"
#include "rankstat/stats.hpp"
#include "rankstat/ulmer.hpp"
#include "rankstat/upsets.hpp"

using namespace rankstat;
using namespace rankstat::stats;
using arith::u64;

namespace {

const PrimeTable& table_1e6() {
  static const PrimeTable t = sieve_primes(1'000'000, 1'000'000);
  return t;
}

const CensusRow& row(const CensusReport& r, const std::string& label) {
  for (const auto& row : r.rows) {
    if (row.label == label) return row;
  }
  throw std::runtime_error("no row " + label);
}

}  // namespace

TEST_CASE("sieve_primes") {
  const auto t10 = sieve_primes(10);
  CHECK(std::vector<u64>(t10.primes().begin(), t10.primes().end()) == std::vector<u64>{2, 3, 5, 7});
  CHECK(sieve_primes(100).primes().size() == 25);
  CHECK(table_1e6().primes().size() == 78498);
  CHECK(sieve_primes(1).primes().empty());
  CHECK(sieve_primes(2).primes().size() == 1);
  CHECK_THROWS_AS(sieve_primes(kSieveCap + 1), std::range_error);
  CHECK(table_1e6().count_upto(100000) == 9592);
  // segmented output against trial division around segment boundaries
  const auto t = sieve_primes(300000);
  std::size_t i = 0;
  for (u64 n = 2; n <= 300000; ++n) {
    if (oracle::prime(n)) REQUIRE(t.primes()[i++] == n);
  }
  CHECK(i == t.primes().size());
}

TEST_CASE("spf table factorizations") {
  const auto spf = build_spf(50000);
  for (u64 n = 2; n <= 50000; ++n) {
    REQUIRE(spf[n] == oracle::trial_factor(n).begin()->first);
  }
  const auto& t = table_1e6();
  for (u64 n : {1ULL, 720720ULL, 999983ULL, 1000000ULL, 1000003ULL, 133ULL * 1000003ULL}) {
    REQUIRE(t.factorize(n) == arith::factorize(n));
  }
}

TEST_CASE("log_nu and li") {
  CHECK(log_nu(1.0, 1) == 1.0);
  CHECK(log_nu(std::exp(5.0), 1) == doctest::Approx(5.0));
  CHECK(log_nu(std::exp(std::exp(3.0)), 2) == doctest::Approx(3.0));
  CHECK(li(2.0) == 0.0);
  const auto f = oracle::fixtures();
  CHECK(li(100.0) == doctest::Approx(f["li_100"].get<double>()).epsilon(1e-9));
  CHECK(li(1e6) == doctest::Approx(f["li_1e6"].get<double>()).epsilon(1e-9));
  CHECK(std::abs(li(1e6) - 78626.5) < 0.5);
  CHECK_THROWS_AS(li(1.5), std::domain_error);
}

TEST_CASE("rpk_census small exact") {
  const auto f = oracle::fixtures()["rpk_3_100_k3"];
  const auto t = sieve_primes(100);
  const auto r = rpk_census(3, 100, 3, t);
  const auto buckets = f["buckets"].get<std::vector<u64>>();
  u64 total = 0;
  for (unsigned k = 0; k <= 3; ++k) {
    const auto& rw = r.rows[k];
    CHECK(rw.observed == buckets[k]);
    total += rw.observed;
  }
  CHECK(row(r, "k>3").observed == f["tail"].get<u64>());
  total += row(r, "k>3").observed;
  CHECK(total == 23);
  CHECK_FALSE(row(r, "k>=3").partition);
  CHECK(row(r, "k=0 (complement)").predicted == Rational{1, 3});
  CHECK(r.baseline == Baseline::PiOfX);
  CHECK(r.baseline_value == 25.0);
  CHECK_THROWS(rpk_census(3, 100, 1, t));
}

TEST_CASE("rpk_census at 10^6 matches frozen counts") {
  const auto f = oracle::fixtures();
  for (u64 p : {2, 3}) {
    const auto r = rpk_census(p, 1'000'000, 5, table_1e6());
    const auto ref = f[p == 2 ? "rpk_2_1e6_k5" : "rpk_3_1e6_k5"];
    const auto buckets = ref["buckets"].get<std::vector<u64>>();
    for (unsigned k = 0; k <= 5; ++k) REQUIRE(r.rows[k].observed == buckets[k]);
    CHECK(row(r, "k>5").observed == ref["tail"].get<u64>());
    u64 sum = 0;
    for (const auto& rw : r.rows) {
      if (rw.partition) sum += rw.observed;
    }
    CHECK(sum == 78498 - 1 - (p == 2 ? 0 : 1));
  }
  // thread count does not change anything
  const auto a = rpk_census(3, 1'000'000, 5, table_1e6(), {1});
  const auto b = rpk_census(3, 1'000'000, 5, table_1e6(), {3});
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].observed == b.rows[i].observed);
}

TEST_CASE("rpk_census warns when p is large for x") {
  const auto t = sieve_primes(1000);
  CHECK_FALSE(rpk_census(7, 1000, 3, t).warnings.empty());
  CHECK_THROWS_AS(rpk_census(3, 2000, 3, t), std::range_error);
}

TEST_CASE("qpm_census") {
  const auto f = oracle::fixtures();
  const auto r = qpm_census(3, 5, 1'000'000, table_1e6());
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].observed == f["qpm_3_5_1e6"].get<u64>());
  CHECK(r.rows[0].predicted == Rational{1, 12});
  const auto one = qpm_census(3, 1, 1'000'000, table_1e6());
  const auto rpk = rpk_census(3, 1'000'000, 5, table_1e6());
  CHECK(one.rows[0].observed == row(rpk, "k=1").observed);
  const auto two = qpm_census(2, 3, 100000, table_1e6());
  CHECK(two.rows[0].predicted == Rational{1, 6});
  CHECK(two.rows[0].observed == f["qpm_2_3_1e5"].get<u64>());
  CHECK_THROWS_AS(qpm_census(3, 4, 1000, table_1e6()), std::domain_error);
  CHECK_THROWS_AS(qpm_census(3, 9, 1000, table_1e6()), std::domain_error);
}

TEST_CASE("npk_census direct equals inclusion-exclusion") {
  const auto f = oracle::fixtures();
  const auto ref = f["npk_direct_1e5"];
  for (u64 p : {3, 5}) {
    for (unsigned k = 1; k <= 3; ++k) {
      const auto r = npk_census(p, 100000, k, table_1e6());
      CHECK(r.identity_holds());
      CHECK(r.direct == ref[std::to_string(p) + "," + std::to_string(k)].get<u64>());
      CHECK(r.census.baseline == Baseline::LiOfX);
    }
  }
  const auto big = npk_census(3, 1'000'000, 1, table_1e6());
  CHECK(big.direct == f["npk_3_1e6_1"].get<u64>());
  CHECK(std::abs(big.census.rows[0].ratio - 0.25) < 0.02);
  const auto two = npk_census(2, 10000, 1, table_1e6());
  CHECK(two.identity_holds());
  CHECK_FALSE(two.census.rows[0].predicted);
  CHECK_FALSE(two.census.warnings.empty());
}

TEST_CASE("up_members and up_census") {
  const auto f = oracle::fixtures();
  const auto t = sieve_primes(1000);
  CHECK(up_members(2, 100, t) == f["up_2_100"].get<std::vector<u64>>());
  CHECK(up_members(3, 10, t) == f["up_3_10"].get<std::vector<u64>>());
  const auto r = up_census(3, 1000, t);
  CHECK(r.rows[0].observed == f["up_3_1000_count"].get<u64>());
  CHECK(r.baseline == Baseline::XOverLogTwoThirds);
  CHECK_FALSE(r.rows[0].predicted);
  const auto members = up_members(2, 500, t);
  for (u64 d = 1; d <= 500; ++d) {
    const bool in = std::binary_search(members.begin(), members.end(), d);
    REQUIRE(in == oracle::divides_some_p_n_plus_one(2, d, 2 * d + 2));
  }
}

TEST_CASE("average_rank_survey") {
  const auto f = oracle::fixtures();
  const auto t = sieve_primes(1000);
  auto r = average_rank_survey(2, 1000, t);
  const auto ref = f["survey_2_1000"];
  CHECK(r.members == ref["count"].get<u64>());
  CHECK(r.sum_iq == ref["sum_iq"].get<u64>());
  CHECK(r.max_iq == ref["max_iq"].get<u64>());
  CHECK(r.argmax_d == ref["argmax"].get<u64>());
  CHECK(r.mean_iq == doctest::Approx(static_cast<double>(r.sum_iq) / static_cast<double>(r.members)));
  u64 hist_total = 0;
  for (const auto& b : r.histogram) hist_total += b.count;
  CHECK(hist_total == r.members);

  r = average_rank_survey(3, 100, t);
  CHECK(r.max_iq == f["survey_3_100"]["max_iq"].get<u64>());
  CHECK(r.argmax_d == f["survey_3_100"]["argmax"].get<u64>());
  CHECK(r.sum_iq == f["survey_3_100"]["sum_iq"].get<u64>());

  r = average_rank_survey(5, 1, t);
  CHECK(r.members == 1);
  CHECK(r.mean_iq == 1.0);
}

TEST_CASE("truncated_h") {
  CHECK(truncated_h(arith::factorize(1), 10.0) == 0.0);
  // phi(63) = 36 = 2^2 3^2
  CHECK(truncated_h(arith::factorize(63), 10.0) == doctest::Approx(2 * std::log(2.0) + 2 * std::log(3.0)));
  CHECK(truncated_h(arith::factorize(63), 2.5) == doctest::Approx(2 * std::log(2.0)));
  // phi(49) = 42 = 2 3 7
  CHECK(truncated_h(arith::factorize(49), 7.0) == doctest::Approx(std::log(42.0)));
}

TEST_CASE("normal_order_survey exhaustive") {
  const auto t = sieve_primes(2000);
  const auto r = normal_order_survey(3, 2000, 10, 1, t);
  CHECK(r.exhaustive);
  REQUIRE(r.samples.size() == 2000);
  const auto& s133 = r.samples[132];
  CHECK(s133.d == 133);
  CHECK(s133.quotient == 6);
  CHECK(s133.ratio_log == doctest::Approx(std::log(6.0)));
  CHECK(r.samples[0].d_p == 1);
  CHECK(r.samples[0].ratio_log == 0.0);
  const auto two = normal_order_survey(2, 2000, 10, 1, t);
  CHECK(two.samples[44].d_p == 5);
  CHECK(two.samples[44].ratio_log == 0.0);
  CHECK(r.l_bound == doctest::Approx(r.y * std::log(r.y)));
}

TEST_CASE("normal_order_survey sampled is deterministic") {
  const auto t = sieve_primes(10'000'000, 10'000'000);
  const auto a = normal_order_survey(3, 50'000'000, 400, 42, t);
  const auto b = normal_order_survey(3, 50'000'000, 400, 42, t, {4});
  const auto c = normal_order_survey(3, 50'000'000, 400, 43, t);
  CHECK_FALSE(a.exhaustive);
  REQUIRE(a.samples.size() == 400);
  bool same = true, differs = false;
  for (std::size_t i = 0; i < 400; ++i) {
    same = same && a.samples[i].d == b.samples[i].d && a.samples[i].h_p == b.samples[i].h_p;
    differs = differs || a.samples[i].d != c.samples[i].d;
  }
  CHECK(same);
  CHECK(differs);
  for (const auto& s : a.samples) {
    REQUIRE(s.d >= 1);
    REQUIRE(s.d <= 50'000'000);
    const u64 phi = arith::euler_phi(s.d_p), lam = arith::carmichael_lambda(s.d_p);
    REQUIRE(phi % lam == 0);
    REQUIRE(s.quotient == phi / lam);
    double h = 0.0;
    for (const auto& [l, v] : oracle::trial_factor(phi)) {
      if (static_cast<double>(l) <= a.l_bound) h += static_cast<double>(v) * std::log(static_cast<double>(l));
    }
    REQUIRE(s.h_p == h);
  }
}

TEST_CASE("UniformSampler") {
  UniformSampler a(10, 5), b(10, 5);
  std::set<u64> seen;
  for (int i = 0; i < 2000; ++i) {
    const u64 v = a.next();
    REQUIRE(v == b.next());
    REQUIRE(v >= 1);
    REQUIRE(v <= 10);
    seen.insert(v);
  }
  CHECK(seen.size() == 10);
}
