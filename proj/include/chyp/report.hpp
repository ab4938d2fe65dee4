#pragma once

#include "chyp/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace chyp {

struct Witness {
  HoroCoord point;
  std::string word;
};

struct VerificationReport {
  std::string check_name;
  long long samples_tested = 0;
  long long violations = 0;
  long long undecided = 0;
  long long undecided_of = 0;  // samples the undecided count refers to; 0 means samples_tested
  double min_margin = INFINITY;
  std::optional<Witness> witness;
  std::uint64_t seed = 0;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  bool passed() const { return violations == 0; }

  /// Keeps the worst case seen so far.
  void record(double margin, const HoroCoord& p, const std::string& word) {
    if (margin < min_margin) {
      min_margin = margin;
      witness = Witness{p, word};
    }
  }

  double undecided_fraction() const {
    const long long n = undecided_of > 0 ? undecided_of : samples_tested;
    return n > 0 ? static_cast<double>(undecided) / static_cast<double>(n) : 0.0;
  }
};

inline nlohmann::ordered_json json_number(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

inline nlohmann::ordered_json to_json(const HoroCoord& p) {
  return {{"x", json_number(p.x())}, {"y", json_number(p.y())}, {"u", json_number(p.u)}, {"v", json_number(p.v)}};
}

inline nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["check_name"] = r.check_name;
  j["passed"] = r.passed();
  j["seed"] = r.seed;
  j["samples_tested"] = r.samples_tested;
  j["violations"] = r.violations;
  j["undecided"] = r.undecided;
  j["undecided_fraction"] = json_number(r.undecided_fraction());
  j["min_margin"] = json_number(r.min_margin);
  if (r.witness)
    j["witness"] = {{"point", to_json(r.witness->point)}, {"word", r.witness->word}};
  else
    j["witness"] = nullptr;
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

}  // namespace chyp
