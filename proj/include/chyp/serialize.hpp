#pragma once

// JSON views of the construction and of Toledo results.

#include "chyp/config.hpp"
#include "chyp/report.hpp"
#include "chyp/toledo.hpp"

#include <chrono>
#include <ctime>

namespace chyp {

using Json = nlohmann::ordered_json;

inline Json to_json(const cplx& z) { return Json::array({json_number(z.real()), json_number(z.imag())}); }

inline Json to_json(const Mat3& m) {
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 3; ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline Json to_json(const Mat2& m) {
  return Json::array({Json::array({m(0, 0), m(0, 1)}), Json::array({m(1, 0), m(1, 1)})});
}

inline Json to_json(const RunConfig& c) {
  Json j;
  j["g1"] = c.g1;
  j["g2"] = c.g2;
  j["r"] = c.r;
  j["t"] = c.t ? Json(*c.t) : Json("auto");
  j["margin"] = c.margin;
  j["blend_fraction"] = c.blend_fraction;
  j["ford_depth"] = c.ford_depth;
  j["margin_samples"] = c.margin_samples;
  j["seed"] = c.seed;
  j["word_length"] = c.word_length;
  j["samples"] = c.samples;
  j["fundamental_word_length"] = c.fundamental_word_length;
  j["fundamental_samples"] = c.fundamental_samples;
  j["phi_samples"] = c.phi_samples;
  j["coverage_samples"] = c.coverage_samples;
  j["nonidentity_word_length"] = c.nonidentity_word_length;
  j["census_word_length"] = c.census_word_length;
  j["undecided_max"] = c.undecided_max;
  j["nonidentity_tol"] = c.nonidentity_tol;
  j["mesh_ns"] = c.mesh_ns;
  j["mesh_nxi"] = c.mesh_nxi;
  j["subdivision_n"] = c.subdivision_n;
  j["toledo_tol"] = c.toledo_tol;
  j["subdivision_tol"] = c.subdivision_tol;
  j["limitset_word_length"] = c.limitset_word_length;
  j["limitset_png"] = c.limitset_png;
  j["output_dir"] = c.output_dir;
  return j;
}

inline Json to_json(const Factor& f, int index) {
  Json j;
  j["factor"] = index + 1;
  j["genus"] = f.group.genus;
  j["orientation"] = f.group.orientation;
  j["plane_v"] = f.plane.v_offset;
  Json gens = Json::array();
  for (const Mat2& g : f.group.generators) gens.push_back(to_json(g));
  j["generators_sl2"] = gens;
  Json emb = Json::array();
  for (const Isometry& g : f.images) emb.push_back(to_json(g.matrix()));
  j["generators_su21"] = emb;
  j["unbounded_x0"] = f.domain.unbounded_x0;
  j["bounded_sides"] = f.domain.sides.size();
  j["max_height"] = f.domain.max_height;
  j["horoballs"] = {{"h_B", f.horoballs.h_B}, {"h_b", f.horoballs.h_b}, {"h_beta", f.horoballs.h_beta}};
  return j;
}

inline Json to_json(const AmalgamRep& rep) {
  Json j;
  j["g1"] = rep.presentation.g1;
  j["g2"] = rep.presentation.g2;
  j["r"] = rep.r;
  j["t"] = rep.t();
  j["v1"] = rep.v1;
  j["v2"] = rep.v2;
  j["w_mid"] = rep.w_mid;
  j["separation_margin"] = rep.separation;
  j["relator"] = to_string(rep.presentation.relator());
  j["gamma"] = to_string(rep.presentation.gamma());
  j["relator_residual"] = distance_from_scalar(rep.rho(rep.presentation.relator()).matrix());
  j["gamma_residual"] = distance_mod_scalar(rep.rho(rep.presentation.gamma()), rep.d);
  j["d"] = to_json(rep.d.matrix());
  j["factors"] = Json::array({to_json(rep.factors[0], 0), to_json(rep.factors[1], 1)});
  j["section"] = {{"x0", {rep.section.x0[0], rep.section.x0[1]}},
                  {"w_lo", rep.section.w_lo},
                  {"w_hi", rep.section.w_hi},
                  {"blend_fraction", rep.section.blend_fraction}};
  return j;
}

inline Json to_json(const ToledoResult& r) {
  Json j;
  j["tau"] = json_number(r.tau);
  j["error"] = json_number(r.error);
  j["integral"] = json_number(r.integral);
  j["coarse"] = json_number(r.coarse);
  j["fine"] = json_number(r.fine);
  j["mesh_error"] = json_number(r.mesh_error);
  j["fd_error"] = json_number(r.fd_error);
  j["abs_mass"] = json_number(r.abs_mass);
  j["resolution"] = {{"ns", r.resolution.ns}, {"nxi", r.resolution.nxi}};
  Json pp = Json::array();
  for (double x : r.per_piece) pp.push_back(json_number(x));
  j["per_piece"] = pp;
  return j;
}

inline Json to_json(const SubdivisionResult& s) {
  Json j;
  j["n"] = s.n;
  Json pieces = Json::array();
  for (const AreaEstimate& p : s.pieces)
    pieces.push_back({{"integral", json_number(p.value)}, {"error", json_number(p.error)}, {"abs_mass", json_number(p.abs_mass)}});
  j["pieces"] = pieces;
  j["total"] = json_number(s.total);
  j["total_error"] = json_number(s.total_error);
  j["max_relative_spread"] = json_number(s.max_relative_spread());
  return j;
}

/// UTC, ISO 8601.
inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace chyp
