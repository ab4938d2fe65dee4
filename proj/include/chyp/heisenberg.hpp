#pragma once

// The Heisenberg group at infinity, its horizontal and vertical one-parameter
// subgroups, and the quotient of Y = H^2_C + boundary - {inf} by the
// horizontal translations <H_r>.

#include "chyp/core.hpp"

namespace chyp {

struct HeisElem {
  cplx z;
  double v = 0.0;
};

inline HeisElem heis_mul(const HeisElem& a, const HeisElem& b) {
  return {a.z + b.z, a.v + b.v + 2.0 * std::imag(a.z * std::conj(b.z))};
}

inline HeisElem heis_inverse(const HeisElem& a) { return {-a.z, -a.v}; }

/// Left action of the Heisenberg group on a horosphere (u is untouched).
inline HoroCoord heis_act(const HeisElem& g, const HoroCoord& p) {
  const HeisElem q = heis_mul(g, HeisElem{p.z, p.v});
  return {q.z, p.u, q.v};
}

// Unipotent matrix fixing (0,1,0):
//   (w1, w2) -> (w1 + a, w2 + conj(a) w1 + |a|^2/2 - i s/2)
// which moves horospherical coordinates by (a, s) in the group law above.
inline Isometry heis_translation(const HeisElem& g) {
  Mat3 m = Mat3::Identity();
  m(0, 2) = g.z;
  m(1, 0) = std::conj(g.z);
  m(1, 2) = cplx(0.5 * std::norm(g.z), -0.5 * g.v);
  return Isometry::from_su21(m);
}

/// H_r(x, y, u, v) = (x + r, y, u, v - 2ry)
inline Isometry h_translation(double r) { return heis_translation({cplx(r, 0.0), 0.0}); }

/// V_t(x, y, u, v) = (x, y, u, v + t)
inline Isometry v_translation(double t) { return heis_translation({cplx(0.0, 0.0), t}); }

/// Coordinates on Y / <H_r>: the orbit of (x, y, u, v) is labelled by
/// (y, w = v + 2xy, u).
struct QuotientCoord {
  double y = 0.0;
  double w = 0.0;
  double u = 0.0;
};

inline QuotientCoord quotient_map(const HoroCoord& p) {
  return {p.y(), p.v + 2.0 * p.x() * p.y(), p.u};
}

/// The plane P = {x = 0} as a global section of the quotient map.
inline HoroCoord section_P(const QuotientCoord& q) { return {cplx(0.0, q.y), q.u, q.w}; }

/// V_t descends to the quotient as w -> w + t.
inline QuotientCoord v_translate(const QuotientCoord& q, double t) { return {q.y, q.w + t, q.u}; }

}  // namespace chyp
