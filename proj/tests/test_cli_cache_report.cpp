#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "rankstat/cache.hpp"
#include "rankstat/cli.hpp"
#include "rankstat/construct.hpp"
#include "rankstat/report.hpp"
#include "rankstat/sieve.hpp"

using namespace rankstat;
using arith::u64;
using Json = report::Json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int s = cli::run(args, out, err);
  return {s, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rankstat-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<unsigned char> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& b) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST_CASE("cli rank") {
  const auto r = cli_run({"rank", "--q", "3", "--d", "133"});
  REQUIRE(r.status == cli::kExitOk);
  const auto j = Json::parse(r.out);
  CHECK(j["i_q"] == 9);
  CHECK(j["bracket"] == Json::array({5, 9}));
  CHECK(j["member"] == true);
  CHECK(j["i_q"].is_number_unsigned());

  const auto non = Json::parse(cli_run({"rank", "--q", "3", "--d", "35"}).out);
  CHECK(non["member"] == false);
  CHECK(non["bracket"][0] == 0);
  CHECK(non["bracket"][1].is_null());
  CHECK(non["method"] == "dp-lower-bound");
}

TEST_CASE("cli member and classify") {
  auto j = Json::parse(cli_run({"member", "--p", "2", "--d", "7"}).out);
  CHECK(j["member"] == false);
  CHECK(j["rejection"] == "odd-order-obstruction");
  j = Json::parse(cli_run({"classify", "--p", "3", "--r", "31", "--m", "5"}).out);
  CHECK(j["k"] == 1);
  CHECK(j["in_Q_pm"] == true);
}

TEST_CASE("cli errors") {
  auto r = cli_run({});
  CHECK(r.status == cli::kExitUsage);
  r = cli_run({"rank", "--q", "3"});
  CHECK(r.status == cli::kExitUsage);
  r = cli_run({"rank", "--q", "3", "--d", "7", "--bogus", "1"});
  CHECK(r.status == cli::kExitUsage);
  r = cli_run({"rank", "--q", "3", "--d", "7", "--output", "xml"});
  CHECK(r.status == cli::kExitUsage);
  r = cli_run({"frobnicate"});
  CHECK(r.status == cli::kExitUsage);

  r = cli_run({"rank", "--q", "3", "--d", "6"});
  CHECK(r.status == cli::kExitDomainError);
  const auto last_line = r.err.substr(r.err.rfind('{'));
  const auto e = Json::parse(last_line);
  CHECK(e["error"] == "domain");
  CHECK(r.out.empty());

  r = cli_run({"rank", "--q", "6", "--d", "5"});
  CHECK(r.status == cli::kExitDomainError);
  r = cli_run({"census-q", "--p", "3", "--m", "4", "--x", "1000"});
  CHECK(r.status == cli::kExitDomainError);
  r = cli_run({"varpi", "--p", "3", "--x", "100", "--n", "4", "--d", "3"});
  CHECK(r.status == cli::kExitDomainError);
  r = cli_run({"survey-normal", "--p", "3", "--x", "1000", "--sample-size", "10"});
  CHECK(r.status == cli::kExitUsage);
  r = cli_run({"construct", "--q", "3", "--mode", "direct", "--y", "16"});
  CHECK(r.status == cli::kExitUsage);
  r = cli_run({"construct", "--q", "3", "--mode", "direct", "--y", "16", "--m", "2", "--delta", "1/10"});
  CHECK(r.status == cli::kExitDomainError);
  r = cli_run({"construct", "--q", "3", "--mode", "direct", "--y", "16", "--m", "2", "--delta", "abc"});
  CHECK(r.status == cli::kExitUsage);
}

TEST_CASE("cli census csv matches library") {
  const auto f = oracle::fixtures();
  const auto r = cli_run({"census-rpk", "--p", "3", "--x", "1000000", "--kmax", "5", "--output", "csv"});
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == report::kCensusCsvHeader);
  std::getline(in, line);
  CHECK(line.rfind("k=0 (complement),26199,1,3,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("k=1,26199,1,3,0.33375", 0) == 0);

  const auto np = Json::parse(cli_run({"census-np", "--p", "5", "--x", "100000", "--k", "2"}).out);
  CHECK(np["identity_holds"] == true);
  CHECK(np["direct"] == f["npk_direct_1e5"]["5,2"]);

  const auto up = cli_run({"census-up", "--p", "3", "--x", "1000", "--output", "table"});
  CHECK(up.out.find("239") != std::string::npos);
}

TEST_CASE("cli surveys") {
  auto a = cli_run({"survey-average", "--q", "2", "--x", "1000"});
  REQUIRE(a.status == 0);
  const auto j = Json::parse(a.out);
  CHECK(j["sum_iq"] == 1088);
  CHECK(j["argmax_d"] == 993);

  const std::vector<std::string> args{"survey-normal", "--p", "3",  "--x", "20000000", "--sample-size",
                                      "200",           "--seed", "9", "--output", "csv"};
  const auto s1 = cli_run(args);
  const auto s2 = cli_run(args);
  REQUIRE(s1.status == 0);
  CHECK(s1.out == s2.out);
  CHECK(std::count(s1.out.begin(), s1.out.end(), '\n') == 201);
}

TEST_CASE("cli construct and verify round trip") {
  const auto dir = scratch("verify");
  const auto r = cli_run({"construct", "--q", "3", "--mode", "direct", "--y", "16", "--window", "10,200", "--m",
                          "2", "--limit", "30"});
  REQUIRE(r.status == 0);
  auto j = Json::parse(r.out);
  CHECK(j["status"] == "ok");
  CHECK(j["search"]["primes"] == Json::array({19, 31, 43, 67, 79, 127, 199}));
  CHECK(j["certificates"].size() == 21);
  {
    std::ofstream(dir / "good.json") << j.dump();
  }
  auto v = cli_run({"verify", "--input", (dir / "good.json").string()});
  CHECK(v.status == 0);
  CHECK(Json::parse(v.out)["passed"] == 21);

  j["certificates"][3]["i_q"] = j["certificates"][3]["i_q"].get<u64>() + 1;
  {
    std::ofstream(dir / "bad.json") << j.dump();
  }
  v = cli_run({"verify", "--input", (dir / "bad.json").string()});
  CHECK(v.status == cli::kExitDomainError);
  const auto vj = Json::parse(v.out);
  CHECK(vj["passed"] == 20);
  CHECK(vj["results"][3]["ok"] == false);

  // a certificate whose d is not in U_2
  Json forged = report::to_json(construct::certify(3, 133, 720720));
  forged["q"] = 2;
  {
    std::ofstream(dir / "forged.json") << Json::array({forged}).dump();
  }
  v = cli_run({"verify", "--input", (dir / "forged.json").string()});
  CHECK(v.status == cli::kExitDomainError);
  CHECK(Json::parse(v.out)["results"][0]["clause"] == "membership");

  v = cli_run({"verify", "--input", (dir / "missing.json").string()});
  CHECK(v.status == cli::kExitDomainError);

  const auto none = cli_run({"construct", "--q", "3", "--mode", "direct", "--y", "16", "--window", "20,30", "--m", "2"});
  CHECK(none.status == 0);
  CHECK(Json::parse(none.out)["status"] == "insufficient-primes");
  fs::remove_all(dir);
}

TEST_CASE("cli config file supplies defaults and flags override") {
  const auto dir = scratch("config");
  {
    std::ofstream cfg(dir / "rank.toml");
    cfg << "[rank]\nq = 3\nd = 133\n";
  }
  auto r = cli_run({"--config", (dir / "rank.toml").string(), "rank"});
  REQUIRE(r.status == 0);
  CHECK(Json::parse(r.out)["i_q"] == 9);
  r = cli_run({"--config", (dir / "rank.toml").string(), "rank", "--d", "82"});
  CHECK(Json::parse(r.out)["i_q"] == 12);
  {
    std::ofstream cfg(dir / "bad.toml");
    cfg << "[rank]\nq = 3\nd = 133\nfoo = 1\n";
  }
  r = cli_run({"--config", (dir / "bad.toml").string(), "rank"});
  CHECK(r.status == cli::kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("cache round trip and invalidation") {
  const auto dir = scratch("cache");
  cache::Cache c(dir);
  const auto built = stats::sieve_primes(1'000'000, 1'000'000);
  const auto first = cache::load_or_build(&c, 1'000'000, 1'000'000);
  CHECK(first == built);
  const auto primes_file = c.path_for(cache::TableKind::Primes, 1'000'000);
  REQUIRE(fs::exists(primes_file));
  const auto loaded = c.load(cache::TableKind::Primes, 1'000'000);
  REQUIRE(loaded);
  CHECK(loaded->size() == 78498);
  CHECK(cache::load_or_build(&c, 1'000'000, 1'000'000) == built);

  auto bytes = read_bytes(primes_file);
  // version bump
  auto bumped = bytes;
  bumped[4] = static_cast<unsigned char>(cache::kFormatVersion + 1);
  write_bytes(primes_file, bumped);
  CHECK_FALSE(c.load(cache::TableKind::Primes, 1'000'000));
  CHECK(cache::load_or_build(&c, 1'000'000, 1'000'000) == built);
  CHECK(read_bytes(primes_file) == bytes);  // rebuilt and rewritten
  // truncation
  auto cut = bytes;
  cut.resize(cut.size() - 4);
  write_bytes(primes_file, cut);
  CHECK_FALSE(c.load(cache::TableKind::Primes, 1'000'000));
  // flipped payload byte
  auto flipped = bytes;
  flipped[100] ^= 1;
  write_bytes(primes_file, flipped);
  CHECK_FALSE(c.load(cache::TableKind::Primes, 1'000'000));
  CHECK(cache::load_or_build(&c, 1'000'000, 1'000'000) == built);
  // wrong x
  CHECK_FALSE(cache::decode(bytes, cache::TableKind::Primes, 999'999));
  CHECK_FALSE(cache::decode(bytes, cache::TableKind::SmallestPrimeFactor, 1'000'000));
  CHECK_FALSE(cache::decode({}, cache::TableKind::Primes, 1'000'000));
  CHECK(c.warnings().empty());
  fs::remove_all(dir);
}

TEST_CASE("cache failures degrade to a warning") {
  const auto dir = scratch("blocked");
  const auto blocker = dir / "file";
  std::ofstream(blocker) << "x";
  cache::Cache c(blocker / "sub");  // parent is a regular file
  const auto t = cache::load_or_build(&c, 1000, 1000);
  CHECK(t.primes().size() == 168);
  CHECK_FALSE(c.warnings().empty());
  fs::remove_all(dir);
}

TEST_CASE("cli output is identical with and without cache") {
  const auto dir = scratch("clicache");
  const std::vector<std::string> base{"census-q", "--p", "3", "--m", "5", "--x", "200000", "--output", "csv"};
  auto with = base;
  with.insert(with.end(), {"--cache-dir", dir.string()});
  const auto plain = cli_run(base);
  const auto cold = cli_run(with);
  const auto warm = cli_run(with);
  CHECK(plain.out == cold.out);
  CHECK(cold.out == warm.out);
  CHECK(fs::exists(dir / "primes-200000.bin"));
  fs::remove_all(dir);
}

TEST_CASE("report json keeps integers exact") {
  const auto c = construct::certify(3, 133, 720720);
  const auto j = report::to_json(c);
  CHECK(j["d"].is_number_unsigned());
  CHECK(j["m_y"].is_number_unsigned());
  CHECK(j["up_class"]["witness_exponent"].is_number_unsigned());
  CHECK(report::certificate_from_json(j) == c);
  auto broken = j;
  broken.erase("order");
  CHECK_THROWS_AS(report::certificate_from_json(broken), std::invalid_argument);
  broken = j;
  broken["d"] = 133.0;
  CHECK_THROWS_AS(report::certificate_from_json(broken), std::invalid_argument);
  CHECK(report::format_real(1.0 / 3.0) == "0.3333333333");
}

TEST_CASE("census csv leaves absent predictions empty") {
  const auto t = stats::sieve_primes(1000);
  const auto csv = report::census_csv(stats::up_census(3, 1000, t));
  CHECK(csv.find("\nU_3,239,,,") != std::string::npos);
}
