#pragma once

#include "isop/measures.hpp"
#include "isop/report.hpp"

#include <toml.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace isop {

/// One verification run. Keys other than the fixed fields land in `params`
/// and are read by the protocol of `id`.
struct Experiment {
  std::string id;
  Geometry geometry{Space::euclidean, 2};
  std::string objective;
  std::string constraint;
  int trials = 100;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::uint64_t samples = 200'000;
  int jobs = 1;
  Json params = Json::object();
  std::string source;  ///< bytes the config hash is taken over

  bool has(const char* key) const { return params.contains(key); }

  double num(const char* key, double def) const {
    if (!params.contains(key)) return def;
    require(params[key].is_number(), Errc::invalid_input, std::string("'") + key + "' must be a number");
    return params[key].get<double>();
  }

  int integer(const char* key, int def) const {
    if (!params.contains(key)) return def;
    require(params[key].is_number_integer(), Errc::invalid_input, std::string("'") + key + "' must be an integer");
    return params[key].get<int>();
  }

  std::string str(const char* key, const std::string& def) const {
    if (!params.contains(key)) return def;
    require(params[key].is_string(), Errc::invalid_input, std::string("'") + key + "' must be a string");
    return params[key].get<std::string>();
  }

  std::vector<double> list(const char* key, std::vector<double> def) const {
    if (!params.contains(key)) return def;
    require(params[key].is_array(), Errc::invalid_input, std::string("'") + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : params[key]) {
      require(v.is_number(), Errc::invalid_input, std::string("'") + key + "' must hold numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }

  /// Monte Carlo settings for one trial; the stream index keeps trials
  /// independent of each other and of the thread count.
  MCConfig mc(std::uint64_t stream = 0, std::uint64_t samples_override = 0) const {
    MCConfig c;
    c.samples = samples_override ? samples_override : samples;
    c.seed = seed * 0x9E3779B97F4A7C15ull + stream;
    c.jobs = 1;
    return c;
  }

  Json to_json() const {
    Json j{{"id", id},
           {"geometry", std::string(1, space_tag(geometry.space))},
           {"d", geometry.dim},
           {"objective", objective},
           {"constraint", constraint},
           {"trials", trials},
           {"seed", seed},
           {"tol", tol},
           {"samples", samples}};
    for (const auto& [k, v] : params.items()) j[k] = v;
    return j;
  }
};

namespace detail {

inline Json toml_to_json(const toml::node& n) {
  if (auto v = n.as_integer()) return Json(v->get());
  if (auto v = n.as_floating_point()) return Json(v->get());
  if (auto v = n.as_boolean()) return Json(v->get());
  if (auto v = n.as_string()) return Json(v->get());
  if (auto a = n.as_array()) {
    Json out = Json::array();
    for (const auto& e : *a) out.push_back(toml_to_json(e));
    return out;
  }
  throw Error(Errc::invalid_input, "experiment files hold flat scalar or array values only");
}

inline void assign_field(Experiment& e, const std::string& key, const Json& v) {
  auto need = [&](bool ok, const char* what) {
    require(ok, Errc::invalid_input, "'" + key + "' must be " + what);
  };
  if (key == "id") {
    need(v.is_string(), "a string");
    e.id = v.get<std::string>();
  } else if (key == "geometry") {
    need(v.is_string(), "a string");
    e.geometry.space = parse_space(v.get<std::string>());
  } else if (key == "d") {
    need(v.is_number_integer() && v.get<int>() >= 1, "a positive integer");
    e.geometry.dim = v.get<int>();
  } else if (key == "objective") {
    need(v.is_string(), "a string");
    e.objective = v.get<std::string>();
  } else if (key == "constraint") {
    need(v.is_string(), "a string");
    e.constraint = v.get<std::string>();
  } else if (key == "trials") {
    need(v.is_number_integer() && v.get<int>() >= 1, "a positive integer");
    e.trials = v.get<int>();
  } else if (key == "seed") {
    need(v.is_number_integer() && v.get<std::int64_t>() >= 0, "a nonnegative integer");
    e.seed = v.get<std::uint64_t>();
  } else if (key == "tol") {
    need(v.is_number() && v.get<double>() >= 0, "a nonnegative number");
    e.tol = v.get<double>();
  } else if (key == "samples") {
    need(v.is_number_integer() && v.get<std::int64_t>() >= 1000, "an integer >= 1000");
    e.samples = v.get<std::uint64_t>();
  } else {
    e.params[key] = v;
  }
}

}  // namespace detail

inline Experiment experiment_from_json(const Json& j) {
  require(j.is_object(), Errc::invalid_input, "experiment must be an object");
  Experiment e;
  for (const auto& [k, v] : j.items()) detail::assign_field(e, k, v);
  require(!e.id.empty(), Errc::invalid_input, "experiment needs an id");
  e.source = j.dump();
  return e;
}

inline Experiment parse_experiment(const std::string& text) {
  toml::table tbl;
  try {
    tbl = toml::parse(text);
  } catch (const toml::parse_error& err) {
    std::ostringstream os;
    os << err.description() << " at line " << err.source().begin.line;
    throw Error(Errc::invalid_input, "experiment file: " + os.str());
  }
  Experiment e;
  for (const auto& [k, v] : tbl) detail::assign_field(e, std::string(k.str()), detail::toml_to_json(v));
  require(!e.id.empty(), Errc::invalid_input, "experiment needs an id");
  e.source = text;
  return e;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::invalid_input, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::invalid_input, "cannot write '" + path + "'");
  out << text;
}

}  // namespace isop
