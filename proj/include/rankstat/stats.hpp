#pragma once

// Empirical censuses over a shared prime table: class densities of R_{p,k}
// and Q_{p,m}, the N_{p,k} decomposition, the count of U_p(x), and the two
// rank surveys.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "rankstat/arith.hpp"
#include "rankstat/sieve.hpp"

namespace rankstat::stats {

using arith::u64;

struct Rational {
  u64 num = 0;
  u64 den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class Baseline { PiOfX, LiOfX, X, XOverLogTwoThirds };

std::string_view to_string(Baseline b);

struct CensusRow {
  std::string label;
  u64 observed = 0;
  /// Unset when no density is predicted for this row.
  std::optional<Rational> predicted;
  double ratio = 0.0;
  std::optional<double> deviation;
  /// False for aggregate rows that overlap the partitioning rows.
  bool partition = true;
};

struct CensusReport {
  std::string label;
  u64 p = 0;
  u64 x = 0;
  Baseline baseline = Baseline::PiOfX;
  double baseline_value = 0.0;
  std::vector<CensusRow> rows;
  std::vector<std::string> warnings;
};

struct CensusOptions {
  unsigned threads = 1;
};

/// log_1 x = max(log x, 1); log_nu x = log_1(log_{nu-1} x).
double log_nu(double x, unsigned nu);

/// Logarithmic integral from 2 to x by adaptive Gauss-Kronrod quadrature.
/// Throws std::domain_error for x < 2.
double li(double x);

/// Buckets the odd primes r <= x, r != p, by k = v_2(ord_p(r)) for
/// k = 0..k_max plus a tail k > k_max. k_max must be >= 2.
CensusReport rpk_census(u64 p, u64 x, unsigned k_max, const PrimeTable& primes, CensusOptions opts = {});

/// #Q_{p,m}(x) against 1/(3 phi(m)).
CensusReport qpm_census(u64 p, u64 m, u64 x, const PrimeTable& primes, CensusOptions opts = {});

struct NpkReport {
  CensusReport census;
  u64 direct = 0;
  u64 inclusion_exclusion = 0;
  bool identity_holds() const { return direct == inclusion_exclusion; }
};

/// Primes r <= x with v_2(ord_p(r)) = 1 and v_2(r - 1) = k, counted directly
/// and through four splitting counts, against 2^(-2k) li(x).
NpkReport npk_census(u64 p, u64 x, unsigned k, const PrimeTable& primes, CensusOptions opts = {});

/// Members of U_p up to x, ascending.
std::vector<u64> up_members(u64 p, u64 x, const PrimeTable& primes, CensusOptions opts = {});

/// #U_p(x), normalized by x / (log x)^(2/3).
CensusReport up_census(u64 p, u64 x, const PrimeTable& primes, CensusOptions opts = {});

struct HistogramBin {
  u64 upper = 0;  // values in (previous upper, upper]
  u64 count = 0;
};

struct AverageRankReport {
  u64 q = 0;
  u64 p = 0;
  u64 x = 0;
  u64 members = 0;
  u64 sum_iq = 0;
  double mean_iq = 0.0;
  u64 max_iq = 0;
  u64 argmax_d = 0;
  u64 median_iq = 0;
  std::vector<HistogramBin> histogram;
  /// x^(1 - log_3 x / (2 log_2 x)); observational only.
  double envelope = 0.0;
};

/// I_q(d) over d in U_p(x).
AverageRankReport average_rank_survey(u64 q, u64 x, const PrimeTable& primes, CensusOptions opts = {});

struct NormalOrderSample {
  u64 d = 0;
  u64 d_p = 1;
  /// phi(d_p) / lambda(d_p), always a positive integer.
  u64 quotient = 1;
  double ratio_log = 0.0;
  double h_p = 0.0;
};

struct NormalOrderReport {
  u64 p = 0;
  u64 x = 0;
  u64 seed = 0;
  bool exhaustive = false;
  double y = 0.0;
  double l_bound = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::vector<NormalOrderSample> samples;
  double median_ratio_log = 0.0;
  double mean_ratio_log = 0.0;
  double median_h_p = 0.0;
  double mean_h_p = 0.0;
  double fraction_within = 0.0;
};

inline constexpr u64 kExhaustiveSurveyCutoff = 1'000'000;

/// Samples d uniformly from [1, x] (exhaustive for x <= 10^6) and records
/// log(phi(d_p)/lambda(d_p)) and the truncated additive statistic
///   h_p(d) = sum_{l <= y log y} v_l(phi(d_p)) log l,  y = log_2 x.
NormalOrderReport normal_order_survey(u64 p, u64 x, u64 sample_size, u64 seed, const PrimeTable& primes,
                                      CensusOptions opts = {});

/// v_l(phi(n)) log l summed over primes l <= bound, read off the
/// factorization of n without forming phi(n).
double truncated_h(const arith::Factorization& n, double bound);

/// Deterministic uniform draw from [1, x] (x >= 1) with rejection sampling
/// over mt19937_64, independent of the standard library's distributions.
class UniformSampler {
 public:
  UniformSampler(u64 x, u64 seed);
  u64 next();

 private:
  u64 x_;
  u64 limit_;
  std::mt19937_64 engine_;
};

}  // namespace rankstat::stats
