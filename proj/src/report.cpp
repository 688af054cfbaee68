#include "rankstat/report.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rankstat::report {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  return buf;
}

std::string census_csv(const stats::CensusReport& r) {
  std::string out = kCensusCsvHeader;
  out += '\n';
  for (const auto& row : r.rows) {
    out += row.label;
    out += ',' + std::to_string(row.observed) + ',';
    if (row.predicted) out += std::to_string(row.predicted->num) + ',' + std::to_string(row.predicted->den);
    else out += ',';
    out += ',' + format_real(row.ratio) + ',';
    if (row.deviation) out += format_real(*row.deviation);
    out += '\n';
  }
  return out;
}

std::string census_table(const stats::CensusReport& r) {
  std::ostringstream os;
  os << r.label << "  x=" << r.x << "  baseline=" << stats::to_string(r.baseline) << " ("
     << format_real(r.baseline_value) << ")\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %12s %12s %14s %14s\n", "class", "observed", "predicted", "ratio",
                "deviation");
  os << line;
  for (const auto& row : r.rows) {
    const std::string pred =
        row.predicted ? std::to_string(row.predicted->num) + "/" + std::to_string(row.predicted->den) : "-";
    std::snprintf(line, sizeof line, "%-20s %12llu %12s %14s %14s\n", row.label.c_str(),
                  static_cast<unsigned long long>(row.observed), pred.c_str(), format_real(row.ratio).c_str(),
                  row.deviation ? format_real(*row.deviation).c_str() : "-");
    os << line;
  }
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  return os.str();
}

Json to_json(const stats::CensusReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json j;
    j["class"] = row.label;
    j["observed"] = row.observed;
    j["predicted_num"] = row.predicted ? Json(row.predicted->num) : Json(nullptr);
    j["predicted_den"] = row.predicted ? Json(row.predicted->den) : Json(nullptr);
    j["ratio"] = row.ratio;
    j["deviation"] = row.deviation ? Json(*row.deviation) : Json(nullptr);
    j["partition"] = row.partition;
    rows.push_back(std::move(j));
  }
  Json j;
  j["label"] = r.label;
  j["p"] = r.p;
  j["x"] = r.x;
  j["baseline"] = stats::to_string(r.baseline);
  j["baseline_value"] = r.baseline_value;
  j["rows"] = std::move(rows);
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const ulmer::RankBracket& b) {
  Json j;
  j["q"] = b.q;
  j["d"] = b.d;
  j["method"] = ulmer::to_string(b.method);
  j["modulus"] = b.modulus;
  j["i_q"] = b.i_q;
  j["lower"] = b.lower;
  j["upper"] = b.upper ? Json(*b.upper) : Json(nullptr);
  Json terms = Json::array();
  for (const auto& t : b.terms) {
    terms.push_back(Json{{"e", t.e}, {"phi", t.phi}, {"order", t.order}, {"contribution", t.contribution}});
  }
  j["terms"] = std::move(terms);
  return j;
}

Json to_json(const ulmer::DpDecomposition& d) {
  Json j;
  j["p"] = d.p;
  j["d"] = d.d;
  j["d_p"] = d.d_p;
  Json support = Json::array();
  for (const auto& s : d.support) support.push_back(Json{{"r", s.r}, {"exponent", s.exponent}, {"k", s.k}});
  j["support"] = std::move(support);
  return j;
}

Json to_json(const upsets::UpClassification& c) {
  Json j;
  j["p"] = c.p;
  j["d"] = c.d;
  j["member"] = c.member;
  j["k"] = c.k ? Json(*c.k) : Json(nullptr);
  j["witness_exponent"] = c.witness_exponent ? Json(*c.witness_exponent) : Json(nullptr);
  j["rejection"] = c.rejection ? Json(upsets::to_string(*c.rejection)) : Json(nullptr);
  return j;
}

Json to_json(const upsets::PrimeClass& c) {
  Json j;
  j["p"] = c.p;
  j["r"] = c.r;
  j["k"] = c.k;
  return j;
}

Json to_json(const stats::AverageRankReport& r) {
  Json j;
  j["q"] = r.q;
  j["p"] = r.p;
  j["x"] = r.x;
  j["members"] = r.members;
  j["sum_iq"] = r.sum_iq;
  j["mean_iq"] = r.mean_iq;
  j["median_iq"] = r.median_iq;
  j["max_iq"] = r.max_iq;
  j["argmax_d"] = r.argmax_d;
  Json hist = Json::array();
  for (const auto& b : r.histogram) hist.push_back(Json{{"upper", b.upper}, {"count", b.count}});
  j["histogram"] = std::move(hist);
  j["envelope"] = r.envelope;
  j["envelope_observational"] = true;
  return j;
}

Json to_json(const stats::NormalOrderReport& r, bool with_samples) {
  Json j;
  j["p"] = r.p;
  j["x"] = r.x;
  j["seed"] = r.seed;
  j["exhaustive"] = r.exhaustive;
  j["samples_count"] = r.samples.size();
  j["y"] = r.y;
  j["l_bound"] = r.l_bound;
  j["target"] = r.target;
  j["tolerance"] = r.tolerance;
  j["median_ratio_log"] = r.median_ratio_log;
  j["mean_ratio_log"] = r.mean_ratio_log;
  j["median_h_p"] = r.median_h_p;
  j["mean_h_p"] = r.mean_h_p;
  j["fraction_within"] = r.fraction_within;
  j["observational"] = true;
  if (with_samples) {
    Json samples = Json::array();
    for (const auto& s : r.samples) {
      samples.push_back(Json{{"d", s.d}, {"d_p", s.d_p}, {"quotient", s.quotient}, {"ratio_log", s.ratio_log},
                             {"h_p", s.h_p}});
    }
    j["samples"] = std::move(samples);
  }
  return j;
}

std::string normal_order_csv(const stats::NormalOrderReport& r) {
  std::string out = "d,d_p,quotient,ratio_log,h_p\n";
  for (const auto& s : r.samples) {
    out += std::to_string(s.d) + ',' + std::to_string(s.d_p) + ',' + std::to_string(s.quotient) + ',' +
           format_real(s.ratio_log) + ',' + format_real(s.h_p) + '\n';
  }
  return out;
}

Json to_json(const construct::ConstructionParams& p) {
  Json j;
  j["q"] = p.q;
  j["p"] = p.p;
  j["u"] = p.u;
  j["modulus"] = p.modulus;
  j["y"] = p.y;
  j["m_y"] = p.m_y;
  j["z"] = p.z;
  j["z_low"] = p.z_low;
  j["z_high"] = p.z_high;
  j["interval_low"] = p.interval_low;
  j["interval_high"] = p.interval_high;
  j["interval_filter"] = p.interval_filter;
  j["m"] = p.m;
  return j;
}

Json to_json(const construct::QSearch& s) {
  Json j;
  j["primes"] = s.primes;
  j["scanned"] = s.scanned;
  j["failed_congruence"] = s.failed_congruence;
  j["failed_smoothness"] = s.failed_smoothness;
  j["failed_interval"] = s.failed_interval;
  return j;
}

Json to_json(const construct::ConstructionCertificate& c) {
  Json j;
  j["q"] = c.q;
  j["d"] = c.d;
  j["support"] = c.support;
  j["m_y"] = c.m_y;
  j["u"] = c.u;
  j["support_congruent"] = c.support_congruent;
  j["up_class"] = to_json(c.up_class);
  j["order"] = c.order;
  j["lambda"] = c.lambda;
  j["lambda_divides_m_y"] = c.lambda_divides_m_y;
  j["i_q"] = c.i_q;
  j["rank_lower"] = c.rank_lower;
  j["weak_lower"] = c.weak_lower;
  return j;
}

namespace {

arith::u64 get_u64(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
    throw std::invalid_argument(std::string("certificate field '") + key + "' missing or not an unsigned integer");
  }
  return j.at(key).get<arith::u64>();
}

bool get_bool(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_boolean()) {
    throw std::invalid_argument(std::string("certificate field '") + key + "' missing or not a boolean");
  }
  return j.at(key).get<bool>();
}

upsets::Rejection parse_rejection(const std::string& s) {
  for (auto r : {upsets::Rejection::SharesFactorWithP, upsets::Rejection::MixedK,
                 upsets::Rejection::ExcessiveTwoPart, upsets::Rejection::OddOrderObstruction}) {
    if (upsets::to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown rejection '" + s + "'");
}

}  // namespace

construct::ConstructionCertificate certificate_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("certificate must be a JSON object");
  construct::ConstructionCertificate c;
  c.q = get_u64(j, "q");
  c.d = get_u64(j, "d");
  c.m_y = get_u64(j, "m_y");
  c.u = get_u64(j, "u");
  if (!j.contains("support") || !j.at("support").is_array()) throw std::invalid_argument("certificate support missing");
  for (const auto& v : j.at("support")) {
    if (!v.is_number_unsigned()) throw std::invalid_argument("certificate support entry is not an integer");
    c.support.push_back(v.get<arith::u64>());
  }
  c.support_congruent = get_bool(j, "support_congruent");
  if (!j.contains("up_class") || !j.at("up_class").is_object()) throw std::invalid_argument("up_class missing");
  const Json& uc = j.at("up_class");
  c.up_class.p = get_u64(uc, "p");
  c.up_class.d = get_u64(uc, "d");
  c.up_class.member = get_bool(uc, "member");
  if (uc.contains("k") && !uc.at("k").is_null()) c.up_class.k = get_u64(uc, "k");
  if (uc.contains("witness_exponent") && !uc.at("witness_exponent").is_null()) {
    c.up_class.witness_exponent = get_u64(uc, "witness_exponent");
  }
  if (uc.contains("rejection") && !uc.at("rejection").is_null()) {
    c.up_class.rejection = parse_rejection(uc.at("rejection").get<std::string>());
  }
  c.order = get_u64(j, "order");
  c.lambda = get_u64(j, "lambda");
  c.lambda_divides_m_y = get_bool(j, "lambda_divides_m_y");
  c.i_q = get_u64(j, "i_q");
  c.rank_lower = get_u64(j, "rank_lower");
  c.weak_lower = get_u64(j, "weak_lower");
  return c;
}

namespace {

void flatten(const Json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out += prefix + ": " + (j.is_string() ? j.get<std::string>() : j.dump()) + '\n';
  }
}

}  // namespace

std::string json_table(const Json& j) {
  std::string out;
  flatten(j, "", out);
  return out;
}

}  // namespace rankstat::report
