#pragma once

// CSV / JSON / plain-text rendering of library results. JSON objects keep a
// fixed key order and exact integers are always emitted as integers.

#include <json.hpp>
#include <string>

#include "rankstat/construct.hpp"
#include "rankstat/stats.hpp"
#include "rankstat/ulmer.hpp"
#include "rankstat/upsets.hpp"

namespace rankstat::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCensusCsvHeader = "class,observed,predicted_num,predicted_den,ratio,deviation";

/// Fixed-point rendering used by every CSV and table column.
std::string format_real(double v);

std::string census_csv(const stats::CensusReport& r);
std::string census_table(const stats::CensusReport& r);
Json to_json(const stats::CensusReport& r);

Json to_json(const ulmer::RankBracket& b);
Json to_json(const ulmer::DpDecomposition& d);
Json to_json(const upsets::UpClassification& c);
Json to_json(const upsets::PrimeClass& c);
Json to_json(const stats::AverageRankReport& r);
/// Summary plus, when with_samples is set, the per-sample rows.
Json to_json(const stats::NormalOrderReport& r, bool with_samples);
std::string normal_order_csv(const stats::NormalOrderReport& r);
Json to_json(const construct::ConstructionParams& p);
Json to_json(const construct::QSearch& s);
Json to_json(const construct::ConstructionCertificate& c);

/// Reads the fields written by to_json(ConstructionCertificate). Throws
/// std::invalid_argument on missing or mistyped fields.
construct::ConstructionCertificate certificate_from_json(const Json& j);

/// Flat key/value rendering of a JSON object, one "key: value" per line.
std::string json_table(const Json& j);

}  // namespace rankstat::report
