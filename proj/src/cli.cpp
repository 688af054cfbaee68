#include "rankstat/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "rankstat/cache.hpp"
#include "rankstat/construct.hpp"
#include "rankstat/report.hpp"
#include "rankstat/stats.hpp"
#include "rankstat/ulmer.hpp"
#include "rankstat/upsets.hpp"

namespace rankstat::cli {

namespace {

using arith::u64;
using report::Json;

enum class Output { Table, Csv, Json };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Params {
  u64 q = 0, p = 0, d = 0, r = 0, x = 0, m = 0, n = 0, k = 0, y = 0;
  unsigned kmax = 5;
  std::string delta = "1/24";
  std::vector<u64> window;
  std::optional<u64> seed;
  u64 limit = 10;
  u64 sample_size = 0;
  std::string mode = "direct";
  std::string interval_filter;
  std::string input;
  bool samples = false;
  Output output = Output::Json;
  std::string cache_dir;
  unsigned threads = 1;
};

struct Rendered {
  Json json;
  std::optional<std::string> csv;
  std::optional<std::string> table;
};

std::string flat_csv(const Json& j) {
  std::string out = "key,value\n";
  std::string flat = report::json_table(j);
  std::size_t pos = 0;
  while (pos < flat.size()) {
    const std::size_t end = flat.find('\n', pos);
    const std::string line = flat.substr(pos, end - pos);
    const std::size_t sep = line.find(": ");
    std::string value = line.substr(sep + 2);
    if (value.find(',') != std::string::npos) value = '"' + value + '"';
    out += line.substr(0, sep) + ',' + value + '\n';
    pos = end + 1;
  }
  return out;
}

class Runner {
 public:
  explicit Runner(const Params& params, std::ostream& err) : prm_(params), err_(err) {
    if (!prm_.cache_dir.empty()) cache_ = std::make_unique<cache::Cache>(prm_.cache_dir);
  }

  stats::PrimeTable table(u64 x) {
    auto t = cache::load_or_build(cache_.get(), x, stats::kDefaultSpfCap);
    if (cache_) {
      for (const auto& w : cache_->warnings()) err_ << "warning: " << w << '\n';
    }
    return t;
  }

  stats::CensusOptions opts() const { return {std::max(1u, prm_.threads)}; }

  Rendered rank() {
    const auto fq = ulmer::FieldOrder::from(prm_.q);
    const auto exact = ulmer::iq(prm_.q, prm_.d);
    const auto cls = upsets::classify_up(fq.p, prm_.d);
    const auto lower = ulmer::rank_lower_bound(prm_.q, prm_.d);
    const auto weak = ulmer::phi_over_lambda_bound(prm_.q, prm_.d);
    Json j;
    j["command"] = "rank";
    j["q"] = prm_.q;
    j["p"] = fq.p;
    j["d"] = prm_.d;
    j["member"] = cls.member;
    j["i_q"] = exact.i_q;
    if (cls.member) {
      j["bracket"] = Json::array({exact.lower, *exact.upper});
      j["method"] = ulmer::to_string(exact.method);
    } else {
      j["bracket"] = Json::array({lower.lower, nullptr});
      j["method"] = ulmer::to_string(lower.method);
    }
    Json terms = Json::array();
    std::string csv = "e,phi,order,contribution\n";
    for (const auto& t : exact.terms) {
      terms.push_back(Json{{"e", t.e}, {"phi", t.phi}, {"order", t.order}, {"contribution", t.contribution}});
      csv += std::to_string(t.e) + ',' + std::to_string(t.phi) + ',' + std::to_string(t.order) + ',' +
             std::to_string(t.contribution) + '\n';
    }
    j["terms"] = std::move(terms);
    j["dp_lower_bound"] = Json{{"d_p", lower.modulus}, {"i_q", lower.i_q}, {"lower", lower.lower}};
    j["phi_over_lambda"] = Json{{"d_p", weak.modulus}, {"quotient", weak.i_q}, {"lower", weak.lower}};
    j["brumer_envelope"] = prm_.d >= 2 ? Json(ulmer::brumer_envelope(fq.p, prm_.d)) : Json(nullptr);
    j["brumer_informational"] = true;
    return {std::move(j), csv, std::nullopt};
  }

  Rendered member() {
    const auto cls = upsets::classify_up(prm_.p, prm_.d);
    Json j = report::to_json(cls);
    j["direct_oracle"] = upsets::member_up_direct_oracle(prm_.p, prm_.d);
    return {std::move(j), std::nullopt, std::nullopt};
  }

  Rendered classify() {
    const auto c = upsets::classify_prime(prm_.p, prm_.r);
    Json j = report::to_json(c);
    j["in_R_p"] = c.k == upsets::rp_class(prm_.p);
    if (prm_.m != 0) j["in_Q_pm"] = upsets::in_Q_pm(prm_.p, prm_.m, prm_.r);
    return {std::move(j), std::nullopt, std::nullopt};
  }

  Rendered census(const stats::CensusReport& r, Json extra = Json::object()) {
    Json j = report::to_json(r);
    for (auto& [k, v] : extra.items()) j[k] = v;
    return {std::move(j), report::census_csv(r), report::census_table(r)};
  }

  Rendered census_rpk() {
    const auto t = table(prm_.x);
    return census(stats::rpk_census(prm_.p, prm_.x, prm_.kmax, t, opts()));
  }

  Rendered census_q() {
    const auto t = table(prm_.x);
    return census(stats::qpm_census(prm_.p, prm_.m, prm_.x, t, opts()));
  }

  Rendered census_np() {
    const auto t = table(prm_.x);
    const auto r = stats::npk_census(prm_.p, prm_.x, static_cast<unsigned>(prm_.k), t, opts());
    return census(r.census, Json{{"direct", r.direct},
                                 {"inclusion_exclusion", r.inclusion_exclusion},
                                 {"identity_holds", r.identity_holds()}});
  }

  Rendered census_up() {
    const auto t = table(prm_.x);
    return census(stats::up_census(prm_.p, prm_.x, t, opts()));
  }

  Rendered varpi() {
    const auto t = table(prm_.x);
    Json j;
    j["p"] = prm_.p;
    j["x"] = prm_.x;
    j["n"] = prm_.n;
    j["d"] = prm_.d;
    j["count"] = upsets::varpi_count(prm_.p, prm_.x, prm_.n, prm_.d, t);
    j["kummer_degree"] = upsets::kummer_degree(prm_.p, prm_.n, prm_.d);
    return {std::move(j), std::nullopt, std::nullopt};
  }

  Rendered survey_average() {
    const auto t = table(prm_.x);
    return {report::to_json(stats::average_rank_survey(prm_.q, prm_.x, t, opts())), std::nullopt, std::nullopt};
  }

  Rendered survey_normal() {
    if (!prm_.seed) throw UsageError("survey-normal requires --seed");
    const u64 cover = std::min<u64>(prm_.x, 10'000'000);
    const auto t = table(cover);
    const auto r = stats::normal_order_survey(prm_.p, prm_.x, prm_.sample_size, *prm_.seed, t, opts());
    Json summary = report::to_json(r, false);
    return {report::to_json(r, prm_.samples), report::normal_order_csv(r), report::json_table(summary)};
  }

  Rendered construct_run() {
    construct::ConstructionSpec spec;
    spec.q = prm_.q;
    if (prm_.mode == "derived") {
      spec.mode = construct::Mode::Derived;
      if (prm_.x == 0) throw UsageError("construct --mode derived requires --x");
      spec.x = prm_.x;
    } else if (prm_.mode == "direct") {
      spec.mode = construct::Mode::Direct;
      if (prm_.y == 0) throw UsageError("construct --mode direct requires --y");
      if (prm_.m == 0) throw UsageError("construct --mode direct requires --m");
    } else {
      throw UsageError("--mode must be 'derived' or 'direct'");
    }
    spec.delta = parse_rational(prm_.delta);
    spec.y = prm_.y;
    if (prm_.m != 0) spec.m = prm_.m;
    if (!prm_.window.empty()) {
      spec.z_low = prm_.window.at(0);
      spec.z_high = prm_.window.at(1);
    }
    if (prm_.interval_filter == "on") spec.interval_filter = true;
    else if (prm_.interval_filter == "off") spec.interval_filter = false;
    else if (!prm_.interval_filter.empty()) throw UsageError("--interval-filter must be 'on' or 'off'");

    const auto params = construct::derive_params(spec);
    if (params.z_high > stats::kSieveCap) throw std::range_error("prime window exceeds the sieve cap");
    const auto t = table(params.z_high);
    const auto search = construct::find_Q(params, t);

    Json j;
    j["command"] = "construct";
    j["params"] = report::to_json(params);
    j["search"] = report::to_json(search);
    Json certs = Json::array();
    std::string csv = "d,support,order,m_y,i_q,rank_lower,weak_lower\n";
    if (search.primes.size() < params.m) {
      j["status"] = "insufficient-primes";
    } else {
      j["status"] = "ok";
      for (const auto& c : construct::build_candidates(params.q, search.primes, params.m, prm_.limit, params.m_y)) {
        certs.push_back(report::to_json(c));
        std::string support;
        for (u64 r : c.support) support += (support.empty() ? "" : " ") + std::to_string(r);
        csv += std::to_string(c.d) + ',' + support + ',' + std::to_string(c.order) + ',' + std::to_string(c.m_y) +
               ',' + std::to_string(c.i_q) + ',' + std::to_string(c.rank_lower) + ',' +
               std::to_string(c.weak_lower) + '\n';
      }
    }
    j["certificates"] = std::move(certs);
    return {std::move(j), csv, std::nullopt};
  }

  Rendered verify(bool& all_ok) {
    std::ifstream in(prm_.input);
    if (!in) throw std::domain_error("cannot open " + prm_.input);
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw std::domain_error(std::string("invalid JSON: ") + e.what());
    }
    Json list = doc;
    if (doc.is_object() && doc.contains("certificates")) list = doc.at("certificates");
    else if (doc.is_object()) list = Json::array({doc});
    if (!list.is_array()) throw std::domain_error("expected a certificate list");

    Json results = Json::array();
    u64 passed = 0;
    for (const auto& item : list) {
      Json r;
      try {
        const auto stored = report::certificate_from_json(item);
        r["d"] = stored.d;
        const auto fresh = construct::certify(stored.q, stored.d, stored.m_y);
        const bool same = fresh == stored;
        r["ok"] = same;
        if (!same) r["clause"] = "field-mismatch";
        if (same) ++passed;
      } catch (const construct::VerificationError& e) {
        r["ok"] = false;
        r["clause"] = e.clause();
        r["message"] = e.what();
      } catch (const std::exception& e) {
        r["ok"] = false;
        r["clause"] = "malformed";
        r["message"] = e.what();
      }
      results.push_back(std::move(r));
    }
    all_ok = passed == results.size();
    Json j;
    j["command"] = "verify";
    j["checked"] = results.size();
    j["passed"] = passed;
    j["results"] = std::move(results);
    return {std::move(j), std::nullopt, std::nullopt};
  }

  static stats::Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) throw UsageError("delta must be written as num/den");
      std::size_t used = 0;
      const u64 num = std::stoull(s.substr(0, slash), &used);
      if (used != slash) throw UsageError("bad delta numerator");
      const std::string den_s = s.substr(slash + 1);
      const u64 den = std::stoull(den_s, &used);
      if (used != den_s.size()) throw UsageError("bad delta denominator");
      return {num, den};
    } catch (const std::logic_error&) {
      throw UsageError("delta must be written as num/den, e.g. 1/24");
    }
  }

 private:
  const Params& prm_;
  std::ostream& err_;
  std::unique_ptr<cache::Cache> cache_;
};

void emit(const Rendered& r, Output output, std::ostream& out) {
  switch (output) {
    case Output::Json:
      out << r.json.dump(2) << '\n';
      break;
    case Output::Csv:
      out << (r.csv ? *r.csv : flat_csv(r.json));
      break;
    case Output::Table:
      out << (r.table ? *r.table : report::json_table(r.json));
      break;
  }
}

void error_json(std::ostream& err, const char* kind, const std::string& message) {
  err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank statistics for y^2 + xy = x^3 - t^d over F_q(t)", "rankstat"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with default option values");
  app.allow_config_extras(CLI::config_extras_mode::error);
  Params prm;

  std::string output_name = "json";
  auto common = [&](CLI::App* sub) {
    sub->add_option("--output", output_name, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
    sub->add_option("--cache-dir", prm.cache_dir, "directory for cached prime tables");
    sub->add_option("--threads", prm.threads, "worker threads")->check(CLI::Range(1u, 256u));
    return sub;
  };
  auto req = [](CLI::App* sub, const char* name, auto& field, const char* help) {
    sub->add_option(name, field, help)->required();
  };

  auto* rank = common(app.add_subcommand("rank", "I_q(d) and the rank bracket"));
  req(rank, "--q", prm.q, "field size (prime power)");
  req(rank, "--d", prm.d, "curve parameter");

  auto* member = common(app.add_subcommand("member", "membership of d in U_p"));
  req(member, "--p", prm.p, "prime");
  req(member, "--d", prm.d, "integer");

  auto* classify = common(app.add_subcommand("classify", "class index of an odd prime r"));
  req(classify, "--p", prm.p, "prime");
  req(classify, "--r", prm.r, "odd prime");
  classify->add_option("--m", prm.m, "also test r in Q_{p,m}");

  auto* rpk = common(app.add_subcommand("census-rpk", "R_{p,k} class densities"));
  req(rpk, "--p", prm.p, "prime");
  req(rpk, "--x", prm.x, "bound");
  rpk->add_option("--kmax", prm.kmax, "largest individually reported k")->check(CLI::Range(2u, 60u));

  auto* cq = common(app.add_subcommand("census-q", "Q_{p,m} density"));
  req(cq, "--p", prm.p, "prime");
  req(cq, "--m", prm.m, "odd modulus coprime to p");
  req(cq, "--x", prm.x, "bound");

  auto* np = common(app.add_subcommand("census-np", "N_{p,k} count and inclusion-exclusion check"));
  req(np, "--p", prm.p, "prime");
  req(np, "--x", prm.x, "bound");
  req(np, "--k", prm.k, "2-adic level");

  auto* up = common(app.add_subcommand("census-up", "count of U_p(x)"));
  req(up, "--p", prm.p, "prime");
  req(up, "--x", prm.x, "bound");

  auto* varpi = common(app.add_subcommand("varpi", "splitting count varpi_p(x; n, d)"));
  req(varpi, "--p", prm.p, "prime");
  req(varpi, "--x", prm.x, "bound");
  req(varpi, "--n", prm.n, "modulus");
  req(varpi, "--d", prm.d, "divisor of n");

  auto* avg = common(app.add_subcommand("survey-average", "I_q over U_p(x)"));
  req(avg, "--q", prm.q, "field size");
  req(avg, "--x", prm.x, "bound");

  auto* normal = common(app.add_subcommand("survey-normal", "phi(d_p)/lambda(d_p) and h_p statistics"));
  req(normal, "--p", prm.p, "prime");
  req(normal, "--x", prm.x, "bound");
  req(normal, "--sample-size", prm.sample_size, "number of samples when x > 10^6");
  normal->add_option("--seed", prm.seed, "sampling seed")->required();
  normal->add_flag("--samples", prm.samples, "include per-sample rows in JSON output");

  auto* cons = common(app.add_subcommand("construct", "certified high-rank parameters"));
  req(cons, "--q", prm.q, "field size");
  cons->add_option("--mode", prm.mode, "derived or direct");
  cons->add_option("--x", prm.x, "target bound (derived mode)");
  cons->add_option("--delta", prm.delta, "rational in (0, 1/12), e.g. 1/24");
  cons->add_option("--y", prm.y, "smoothness bound (direct mode)");
  cons->add_option("--window", prm.window, "prime window lo,hi")->expected(2)->delimiter(',');
  cons->add_option("--m", prm.m, "product arity");
  cons->add_option("--interval-filter", prm.interval_filter, "on or off");
  cons->add_option("--limit", prm.limit, "maximum number of certificates");

  auto* verify = common(app.add_subcommand("verify", "re-certify certificates from a JSON file"));
  req(verify, "--input", prm.input, "JSON produced by construct");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    error_json(err, "usage", e.what());
    return kExitUsage;
  }

  prm.output = output_name == "table" ? Output::Table : output_name == "csv" ? Output::Csv : Output::Json;
  try {
    Runner runner(prm, err);
    Rendered r;
    bool ok = true;
    if (*rank) r = runner.rank();
    else if (*member) r = runner.member();
    else if (*classify) r = runner.classify();
    else if (*rpk) r = runner.census_rpk();
    else if (*cq) r = runner.census_q();
    else if (*np) r = runner.census_np();
    else if (*up) r = runner.census_up();
    else if (*varpi) r = runner.varpi();
    else if (*avg) r = runner.survey_average();
    else if (*normal) r = runner.survey_normal();
    else if (*cons) r = runner.construct_run();
    else if (*verify) r = runner.verify(ok);
    emit(r, prm.output, out);
    if (!ok) {
      error_json(err, "verification", "one or more certificates failed verification");
      return kExitDomainError;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    error_json(err, "usage", e.what());
    return kExitUsage;
  } catch (const construct::VerificationError& e) {
    error_json(err, "verification", e.what());
    return kExitDomainError;
  } catch (const construct::InsufficientInputError& e) {
    error_json(err, "insufficient-input", e.what());
    return kExitDomainError;
  } catch (const std::range_error& e) {
    error_json(err, "range", e.what());
    return kExitDomainError;
  } catch (const std::domain_error& e) {
    error_json(err, "domain", e.what());
    return kExitDomainError;
  } catch (const std::invalid_argument& e) {
    error_json(err, "domain", e.what());
    return kExitDomainError;
  }
}

}  // namespace rankstat::cli
