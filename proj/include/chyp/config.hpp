#pragma once

// Run configuration: flat "key = value" text, '#' starts a comment.

#include "chyp/amalgam.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace chyp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // construction
  int g1 = 1, g2 = 1;
  double r = 6.0;
  std::optional<double> t;  // "auto" when empty
  double margin = 0.5;
  double blend_fraction = 0.5;
  int ford_depth = kDefaultFordDepth;
  int margin_samples = 10000;
  std::uint64_t seed = 1;

  // verification
  int word_length = 4;            // precisely invariant / interactive pair
  int samples = 10000;
  int fundamental_word_length = 6;
  int fundamental_samples = 2000;  // per factor
  int phi_samples = 40;            // whole group: every normal form word is tested
  int coverage_samples = 10000;
  int nonidentity_word_length = 8;
  int census_word_length = 6;
  double undecided_max = 0.05;
  double nonidentity_tol = 1e-6;

  // Toledo
  int mesh_ns = 128;
  int mesh_nxi = 32;
  int subdivision_n = 7;
  double toledo_tol = 1e-2;
  double subdivision_tol = 1e-6;

  // limit set
  int limitset_word_length = 6;
  bool limitset_png = true;

  std::string output_dir = "chyp_out";

  BuildOptions build_options() const {
    BuildOptions o;
    o.g1 = g1;
    o.g2 = g2;
    o.r = r;
    o.t = t;
    o.margin = margin;
    o.blend_fraction = blend_fraction;
    o.ford_depth = ford_depth;
    o.seed = seed;
    o.margin_samples = margin_samples;
    return o;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

template <class T>
T parse_number(const std::string& text) {
  std::istringstream in(text);
  T v;
  if (!(in >> v)) throw std::invalid_argument("expected a number, got '" + text + "'");
  char extra;
  if (in >> extra) throw std::invalid_argument("trailing characters in '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + text + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

inline const std::map<std::string, Setter>& config_setters() {
  static const std::map<std::string, Setter> s = [] {
    std::map<std::string, Setter> m;
    auto integer = [&](const char* key, int RunConfig::*f) {
      m[key] = [f](RunConfig& c, const std::string& v) { c.*f = parse_number<int>(v); };
    };
    auto real = [&](const char* key, double RunConfig::*f) {
      m[key] = [f](RunConfig& c, const std::string& v) { c.*f = parse_number<double>(v); };
    };
    integer("g1", &RunConfig::g1);
    integer("g2", &RunConfig::g2);
    real("r", &RunConfig::r);
    m["t"] = [](RunConfig& c, const std::string& v) {
      if (v == "auto")
        c.t.reset();
      else
        c.t = parse_number<double>(v);
    };
    real("margin", &RunConfig::margin);
    real("blend_fraction", &RunConfig::blend_fraction);
    integer("ford_depth", &RunConfig::ford_depth);
    integer("margin_samples", &RunConfig::margin_samples);
    m["seed"] = [](RunConfig& c, const std::string& v) {
      if (!v.empty() && v[0] == '-') throw std::invalid_argument("seed must be nonnegative");
      c.seed = parse_number<std::uint64_t>(v);
    };
    integer("word_length", &RunConfig::word_length);
    integer("samples", &RunConfig::samples);
    integer("fundamental_word_length", &RunConfig::fundamental_word_length);
    integer("fundamental_samples", &RunConfig::fundamental_samples);
    integer("phi_samples", &RunConfig::phi_samples);
    integer("coverage_samples", &RunConfig::coverage_samples);
    integer("nonidentity_word_length", &RunConfig::nonidentity_word_length);
    integer("census_word_length", &RunConfig::census_word_length);
    real("undecided_max", &RunConfig::undecided_max);
    real("nonidentity_tol", &RunConfig::nonidentity_tol);
    integer("mesh_ns", &RunConfig::mesh_ns);
    integer("mesh_nxi", &RunConfig::mesh_nxi);
    integer("subdivision_n", &RunConfig::subdivision_n);
    real("toledo_tol", &RunConfig::toledo_tol);
    real("subdivision_tol", &RunConfig::subdivision_tol);
    integer("limitset_word_length", &RunConfig::limitset_word_length);
    m["limitset_png"] = [](RunConfig& c, const std::string& v) { c.limitset_png = parse_bool(v); };
    m["output_dir"] = [](RunConfig& c, const std::string& v) {
      if (v.empty()) throw std::invalid_argument("output_dir must not be empty");
      c.output_dir = v;
    };
    return m;
  }();
  return s;
}

}  // namespace detail

inline std::vector<std::string> config_keys() {
  std::vector<std::string> k;
  for (const auto& [key, setter] : detail::config_setters()) k.push_back(key);
  return k;
}

/// Sets one key; `where` prefixes error messages.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value, const std::string& where) {
  const auto& s = detail::config_setters();
  const auto it = s.find(key);
  if (it == s.end()) throw ConfigError(where + "unknown key '" + key + "'");
  try {
    it->second(c, value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + key + ": " + e.what());
  }
}

/// Checks values against the modules' preconditions.
inline void validate(const RunConfig& c) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(c.g1 >= 1 && c.g2 >= 1, "g1 and g2 must be >= 1");
  need(c.r > 0.0 && std::isfinite(c.r), "r must be positive");
  need(!c.t || (*c.t > 0.0 && std::isfinite(*c.t)), "t must be positive or auto");
  need(c.margin > 0.0, "margin must be positive");
  need(c.blend_fraction > 0.0 && c.blend_fraction < 1.0, "blend_fraction must lie in (0, 1)");
  need(c.ford_depth >= 1, "ford_depth must be >= 1");
  need(c.margin_samples >= 1, "margin_samples must be >= 1");
  for (auto [v, name] : {std::pair{c.word_length, "word_length"}, {c.fundamental_word_length, "fundamental_word_length"},
                         {c.nonidentity_word_length, "nonidentity_word_length"},
                         {c.census_word_length, "census_word_length"}, {c.limitset_word_length, "limitset_word_length"}})
    need(v >= 0 && v <= 12, std::string(name) + " must lie in [0, 12]");
  for (auto [v, name] : {std::pair{c.samples, "samples"}, {c.fundamental_samples, "fundamental_samples"},
                         {c.phi_samples, "phi_samples"}, {c.coverage_samples, "coverage_samples"}})
    need(v >= 1, std::string(name) + " must be >= 1");
  need(c.undecided_max >= 0.0 && c.undecided_max <= 1.0, "undecided_max must lie in [0, 1]");
  need(c.nonidentity_tol > 0.0, "nonidentity_tol must be positive");
  need(c.mesh_ns >= 2 && c.mesh_nxi >= 2, "mesh_ns and mesh_nxi must be >= 2");
  need(c.subdivision_n >= 2, "subdivision_n must be >= 2");
  need(c.toledo_tol > 0.0 && c.subdivision_tol > 0.0, "tolerances must be positive");
}

inline RunConfig parse_config(std::istream& in, const std::string& name = "config") {
  RunConfig c;
  std::string line;
  std::map<std::string, int> seen;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (const auto it = seen.find(key); it != seen.end())
      throw ConfigError(where + "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    seen[key] = lineno;
    set_config_value(c, key, value, where);
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(f, path);
}

}  // namespace chyp
