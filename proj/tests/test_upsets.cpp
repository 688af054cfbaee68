#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rankstat/sieve.hpp"
#include "rankstat/upsets.hpp"

using namespace rankstat;
using namespace rankstat::upsets;
using arith::u64;

TEST_CASE("classify_prime examples") {
  CHECK(classify_prime(2, 5).k == 2);
  CHECK(classify_prime(2, 7).k == 0);
  CHECK(classify_prime(3, 7).k == 1);
  CHECK_THROWS_AS(classify_prime(3, 3), std::domain_error);
  CHECK_THROWS_AS(classify_prime(3, 2), std::domain_error);
  CHECK_THROWS_AS(classify_prime(3, 9), std::domain_error);
}

TEST_CASE("classify_prime agrees with brute order") {
  for (u64 p : {2, 3, 5, 7}) {
    for (u64 r = 3; r < 3000; r += 2) {
      if (r == p || !oracle::prime(r)) continue;
      REQUIRE(classify_prime(p, r).k == arith::v2(oracle::order(p, r)));
    }
  }
}

TEST_CASE("in_R_p") {
  CHECK(in_R_p(2, 5));
  CHECK_FALSE(in_R_p(2, 3));
  CHECK(in_R_p(3, 7));
  CHECK_THROWS_AS(in_R_p(2, 2), std::domain_error);
}

TEST_CASE("classify_up examples") {
  auto c = classify_up(2, 9);
  CHECK(c.member);
  CHECK(c.k == 1u);
  CHECK(c.witness_exponent == 3u);

  c = classify_up(3, 8);
  CHECK_FALSE(c.member);
  CHECK(c.rejection == Rejection::ExcessiveTwoPart);

  c = classify_up(2, 7);
  CHECK_FALSE(c.member);
  CHECK(c.rejection == Rejection::OddOrderObstruction);

  c = classify_up(3, 4);
  CHECK(c.member);
  CHECK(c.k == 1u);
  CHECK(c.witness_exponent == 1u);

  CHECK(classify_up(2, 15).rejection == Rejection::MixedK);
  CHECK(classify_up(3, 6).rejection == Rejection::SharesFactorWithP);
  CHECK(classify_up(5, 1).member);
  CHECK(classify_up(5, 1).witness_exponent == 1u);
  CHECK(to_string(Rejection::MixedK) == "mixed-k");
}

TEST_CASE("classify_up witnesses really divide") {
  for (u64 p : {2, 3, 5, 7}) {
    for (u64 d = 1; d <= 3000; ++d) {
      const auto c = classify_up(p, d);
      if (!c.member) continue;
      REQUIRE(c.witness_exponent);
      REQUIRE((arith::pow_mod(p, *c.witness_exponent, d) + 1) % d == 0);
    }
  }
}

TEST_CASE("member_up_direct_oracle examples") {
  CHECK(member_up_direct_oracle(2, 9));
  CHECK_FALSE(member_up_direct_oracle(3, 8));
  CHECK(member_up_direct_oracle(5, 2));
  CHECK_FALSE(member_up_direct_oracle(2, 2));
  CHECK(member_up_direct_oracle(7, 1));
}

TEST_CASE("structural and direct membership agree with n-search") {
  for (u64 p : {2, 3, 5, 7, 11}) {
    for (u64 d = 1; d <= 400; ++d) {
      const bool brute = oracle::divides_some_p_n_plus_one(p, d, 2 * d + 2);
      REQUIRE(classify_up(p, d).member == brute);
      REQUIRE(member_up_direct_oracle(p, d) == brute);
    }
  }
}

TEST_CASE("in_Q_pm") {
  CHECK(in_Q_pm(3, 5, 31));
  CHECK_FALSE(in_Q_pm(3, 5, 7));
  CHECK(in_Q_pm(2, 3, 13));
  CHECK_FALSE(in_Q_pm(3, 5, 2));
  CHECK_FALSE(in_Q_pm(3, 5, 3));
  CHECK_THROWS_AS(in_Q_pm(3, 4, 31), std::domain_error);
  CHECK_THROWS_AS(in_Q_pm(3, 15, 31), std::domain_error);
  CHECK_THROWS_AS(in_Q_pm(3, 5, 33), std::domain_error);
}

TEST_CASE("kummer_degree examples") {
  CHECK(kummer_degree(2, 8, 2) == 4);
  CHECK(kummer_degree(3, 4, 2) == 4);
  CHECK(kummer_degree(5, 10, 2) == 4);
  CHECK(kummer_degree(3, 8, 4) == 16);
  CHECK(kummer_degree(3, 12, 2) == 4);  // sqrt 3 lies in Q(zeta_12)
  CHECK(kummer_degree(7, 1, 1) == 1);
  CHECK_THROWS_AS(kummer_degree(3, 8, 3), std::domain_error);
}

TEST_CASE("kummer_degree_general") {
  CHECK(kummer_degree_general(-2, 8, 2) == 4);   // sqrt(-2) in Q(zeta_8)
  CHECK(kummer_degree_general(-2, 4, 2) == 4);
  CHECK(kummer_degree_general(-3, 6, 2) == 2);   // sqrt(-3) in Q(zeta_3)
  CHECK(kummer_degree_general(6, 24, 2) == 8);   // sqrt 6 in Q(zeta_24)
  CHECK(kummer_degree_general(6, 12, 2) == 8);
  CHECK_THROWS_AS(kummer_degree_general(4, 4, 2), std::domain_error);
  CHECK_THROWS_AS(kummer_degree_general(-1, 4, 2), std::domain_error);
  CHECK_THROWS_AS(kummer_degree_general(1, 4, 2), std::domain_error);
}

TEST_CASE("varpi_count examples and brute force") {
  const auto t = stats::sieve_primes(10000);
  CHECK(varpi_count(3, 100, 4, 2, t) == 5);
  CHECK(varpi_count(2, 10, 3, 3, t) == 0);
  CHECK(varpi_count(3, 100, 1, 1, t) == 24);
  CHECK(varpi_count(101, 100, 1, 1, t) == 25);
  CHECK_THROWS_AS(varpi_count(3, 100, 4, 3, t), std::domain_error);
  CHECK_THROWS_AS(varpi_count(3, 20000, 4, 2, t), std::range_error);

  for (u64 p : {2, 3, 5}) {
    for (u64 n : {1, 2, 4, 6, 8, 12}) {
      for (u64 d = 1; d <= n; ++d) {
        if (n % d) continue;
        u64 brute = 0;
        for (u64 r = 2; r <= 10000; ++r) {
          if (r == p || !oracle::prime(r)) continue;
          if ((r - 1) % n == 0 && ((r - 1) / oracle::order(p, r)) % d == 0) ++brute;
        }
        REQUIRE(varpi_count(p, 10000, n, d, t) == brute);
      }
    }
  }
}

TEST_CASE("class_table is thread independent") {
  const auto t = stats::sieve_primes(200000);
  const auto one = class_table(3, t, 1);
  const auto four = class_table(3, t, 4);
  CHECK(one == four);
  REQUIRE(one.size() == t.primes().size());
  for (std::size_t i = 1; i < 500; ++i) {
    const u64 r = t.primes()[i];
    if (r == 3) continue;
    REQUIRE(one[i] == classify_prime(3, r).k);
  }
}
