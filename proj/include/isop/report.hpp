#pragma once

#include "isop/polytope.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

namespace isop {

using Json = nlohmann::ordered_json;

/// Git blob id of `content`: SHA-1 over "blob <size>\0" followed by the bytes.
inline std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  require(ctx != nullptr, Errc::invalid_input, "cannot allocate a digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  require(ok, Errc::invalid_input, "SHA-1 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

/// {"geometry": "E|H|S", "d": d, "model": "ambient", "vertices": [[...], ...]}
inline Json polytope_to_json(const Polytope& P) {
  Json v = Json::array();
  for (const auto& p : P.vertices()) {
    Json row = Json::array();
    for (int i = 0; i < p.coords().size(); ++i) row.push_back(p.coords()[i]);
    v.push_back(std::move(row));
  }
  return Json{{"geometry", std::string(1, space_tag(P.geometry().space))},
              {"d", P.dim()},
              {"model", "ambient"},
              {"vertices", std::move(v)}};
}

inline Polytope polytope_from_json(const Json& j) {
  try {
    require(j.at("model").get<std::string>() == "ambient", Errc::invalid_input,
            "only the ambient model is supported");
    const Geometry g{parse_space(j.at("geometry").get<std::string>()), j.at("d").get<int>()};
    require(g.dim >= 1, Errc::invalid_input, "dimension must be positive");
    std::vector<Point> pts;
    for (const auto& row : j.at("vertices")) {
      Vec x(row.size());
      for (size_t i = 0; i < row.size(); ++i) x[static_cast<int>(i)] = row[i].get<double>();
      pts.push_back(Point(g, std::move(x)));
    }
    return Polytope::from_vertices(std::move(pts));
  } catch (const Json::exception& e) {
    throw Error(Errc::invalid_input, std::string("malformed polytope JSON: ") + e.what());
  }
}

/// How the best value must compare with the benchmark for a pass.
enum class Relation { ge, le, eq, lt, gt };

inline const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::ge: return ">=";
    case Relation::le: return "<=";
    case Relation::eq: return "==";
    case Relation::lt: return "<";
    case Relation::gt: return ">";
  }
  return "?";
}

/// Margin by which `value rel benchmark` holds; negative when violated.
inline double relation_margin(Relation r, double value, double benchmark) {
  switch (r) {
    case Relation::ge:
    case Relation::gt: return value - benchmark;
    case Relation::le:
    case Relation::lt: return benchmark - value;
    case Relation::eq: return -std::abs(value - benchmark);
  }
  return 0;
}

/// Non-strict relations pass with margin >= -tol, strict ones need margin > tol.
inline bool relation_holds(Relation r, double margin, double tol) {
  if (r == Relation::lt || r == Relation::gt) return margin > tol;
  return margin >= -tol;
}

/// A candidate violation with enough context to recompute it.
struct Counterexample {
  Json instance;  ///< {"polytope": ..., "params": {...}}
  double value = 0;
  double benchmark = 0;
};

struct Report {
  std::string id;
  std::string geometry;
  int d = 0;
  std::string objective;
  std::string constraint;
  std::string claim;
  Relation relation = Relation::ge;
  double best = 0;
  double benchmark = 0;
  double tolerance = 0;
  int trials = 0;
  int evaluated = 0;
  std::string note;
  Json details = Json::object();
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::string config_hash;
  std::optional<Counterexample> counterexample;
  std::optional<std::string> dump_path;

  double gap() const { return relation_margin(relation, best, benchmark); }
  bool pass() const { return relation_holds(relation, gap(), tolerance); }
  std::string verdict() const { return pass() ? "pass" : "fail"; }

  Json to_json() const {
    Json j{{"id", id},
           {"geometry", geometry},
           {"d", d},
           {"objective", objective},
           {"constraint", constraint},
           {"claim", claim},
           {"relation", std::string("best ") + relation_symbol(relation) + " benchmark"},
           {"best", best},
           {"benchmark", benchmark},
           {"gap", gap()},
           {"tolerance", tolerance},
           {"trials", trials},
           {"evaluated", evaluated},
           {"verdict", verdict()}};
    if (!note.empty()) j["note"] = note;
    j["details"] = details;
    j["provenance"] = Json{{"seed", seed}, {"samples", samples}, {"config_hash", config_hash}};
    if (dump_path) j["counterexample"] = *dump_path;
    return j;
  }

  static std::string csv_header() {
    return "id,geometry,d,objective,constraint,relation,best,benchmark,gap,tolerance,trials,evaluated,verdict,seed,"
           "samples,config_hash";
  }

  std::string csv_row() const {
    std::ostringstream os;
    os << std::setprecision(17) << id << ',' << geometry << ',' << d << ',' << objective << ',' << constraint << ','
       << relation_symbol(relation) << ',' << best << ',' << benchmark << ',' << gap() << ',' << tolerance << ','
       << trials << ',' << evaluated << ',' << verdict() << ',' << seed << ',' << samples << ',' << config_hash;
    return os.str();
  }

  std::string to_markdown() const {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "## " << id << " (" << geometry << d << ")\n\n" << claim << "\n\n";
    os << "| field | value |\n|---|---|\n";
    os << "| objective | " << objective << " |\n| constraint | " << constraint << " |\n";
    os << "| best " << relation_symbol(relation) << " benchmark | " << best << " vs " << benchmark << " |\n";
    os << "| gap | " << gap() << " |\n| tolerance | " << tolerance << " |\n";
    os << "| trials | " << trials << " (" << evaluated << " evaluated) |\n";
    os << "| verdict | **" << verdict() << "** |\n";
    os << "| seed / samples | " << seed << " / " << samples << " |\n| config | " << config_hash << " |\n";
    if (dump_path) os << "| counterexample | " << *dump_path << " |\n";
    if (!note.empty()) os << "\n" << note << "\n";
    if (!details.empty()) os << "\n```json\n" << details.dump(2) << "\n```\n";
    return os.str();
  }
};

enum class Format { json, csv, md };

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "md") return Format::md;
  throw Error(Errc::invalid_input, "unknown format '" + s + "'");
}

inline std::string render(const Report& r, Format f) {
  switch (f) {
    case Format::json: return r.to_json().dump(2) + "\n";
    case Format::csv: return Report::csv_header() + "\n" + r.csv_row() + "\n";
    case Format::md: return r.to_markdown();
  }
  return {};
}

}  // namespace isop
