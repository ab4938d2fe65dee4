#pragma once

// Totally real planes Sigma_v = {(x, 0, u, v)} = V_v(Sigma_0), the reflections
// through them, orthogonal projection onto them and its boundary extension,
// and the embedding SL(2,R) -> SU(2,1) stabilizing Sigma_v.

#include "chyp/core.hpp"
#include "chyp/heisenberg.hpp"

namespace chyp {

using Mat2 = Eigen::Matrix2d;

struct TotallyRealPlane {
  double v_offset = 0.0;
};

/// Antiholomorphic isometry X -> M conj(X).
struct AntiholInvolution {
  Mat3 matrix;

  Vec3 apply_lift(const Vec3& X) const { return matrix * X.conjugate(); }
  ProjPoint apply(const ProjPoint& p) const { return ProjPoint(apply_lift(p.lift())); }
};

// iota_v = V_v o conj o V_{-v}; since conj(V_{-v}) = V_v the matrix is V_{2v}.
inline AntiholInvolution involution(const TotallyRealPlane& plane) {
  return {v_translation(2.0 * plane.v_offset).matrix()};
}

/// Lift of (z=0, u=1, v=v_offset) with self-pairing -1, fixed by the involution.
inline Vec3 plane_basepoint(const TotallyRealPlane& plane) {
  return Vec3(0.0, cplx(0.5, -0.5 * plane.v_offset), 1.0);
}

/// Orthogonal projection onto Sigma_v: the geodesic midpoint of p and iota_v(p).
inline ProjPoint project(const TotallyRealPlane& plane, const ProjPoint& p) {
  const double pp = herm(p.lift(), p.lift()).real();
  if (!(pp < 0.0)) throw DomainError("project: point is not interior");
  const AntiholInvolution iota = involution(plane);
  const Vec3 X = p.lift() / std::sqrt(-pp);
  const Vec3 Q = iota.apply_lift(X);
  const cplx h = herm(X, Q);
  const double ah = std::abs(h);
  if (!(ah > 0.5)) throw DegeneracyError("project: cannot phase-align point with its reflection");
  // <X, c Q> = conj(c) h is real and negative
  return ProjPoint(X - (h / ah) * Q);
}

inline constexpr double kBoundaryProjectionT = 40.0;

/// Extension of the projection to the ideal boundary, as the limit of the
/// projection along the geodesic from the plane's basepoint towards xi,
/// evaluated at geodesic parameter T.
inline ProjPoint project_boundary(const TotallyRealPlane& plane, const ProjPoint& xi,
                                  double T = kBoundaryProjectionT, double tol = 1e-9) {
  if (xi.is_infinity()) return ProjPoint::infinity();
  const AntiholInvolution iota = involution(plane);
  const Vec3 o = plane_basepoint(plane);
  Vec3 X = xi.lift();
  X /= -herm(X, o);  // now <X, o> = -1
  const Vec3 iX = iota.apply_lift(X);
  const cplx sx = herm(X, iX);
  if (std::abs(sx) <= tol * X.squaredNorm()) return xi;  // xi on the ideal boundary of the plane

  // Z(lam) = o + lam X has cosh^2(d(o, Z)/2) = (1 + lam)^2 / (1 + 2 lam).
  const double C = std::pow(std::cosh(0.5 * T), 2);
  const double lam = (C - 1.0) + std::sqrt(C * (C - 1.0));
  const cplx h = -1.0 - 2.0 * lam + lam * lam * sx;  // <Z, iota Z>
  const cplx c = -h / std::abs(h);
  // midpoint Z + c iota(Z), divided by lam to stay finite
  return ProjPoint((1.0 + c) / lam * o + X + c * iX);
}

// Symmetric square of SL(2,R) acting on (w1, w2, w3) ~ (S12, S11/2, S22) for
// the real symmetric matrix S = Re[(z,1)^T conj(z,1)], transported by V_v.
inline Isometry embed_so21(const Mat2& m, const TotallyRealPlane& plane = {}) {
  if (std::abs(m.determinant() - 1.0) > 1e-12 * std::max(1.0, m.cwiseAbs2().maxCoeff()))
    throw std::invalid_argument("embed_so21: matrix is not unimodular");
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  Mat3 e;
  e << a * d + b * c, 2.0 * a * c, b * d,
       a * b, a * a, 0.5 * b * b,
       2.0 * c * d, 2.0 * c * c, d * d;
  const Isometry g = Isometry::from_su21(e);
  if (plane.v_offset == 0.0) return g;
  return v_translation(plane.v_offset) * g * v_translation(-plane.v_offset);
}

/// Chart UHP -> Sigma_v, xi + i eta -> (x = xi, y = 0, u = eta^2, v = v_offset).
inline HoroCoord uhp_to_plane(const TotallyRealPlane& plane, cplx zeta) {
  return HoroCoord::from_xyuv(zeta.real(), 0.0, zeta.imag() * zeta.imag(), plane.v_offset);
}

/// Inverse chart; only x and u are read, so it is meaningful for points of the plane.
inline cplx plane_to_uhp(const HoroCoord& p) { return {p.x(), std::sqrt(std::max(0.0, p.u))}; }

inline double uhp_distance(cplx a, cplx b) {
  return std::acosh(1.0 + std::norm(a - b) / (2.0 * a.imag() * b.imag()));
}

/// SL(2,R) element sending i to zeta.
inline Mat2 uhp_frame(cplx zeta) {
  const double s = std::sqrt(zeta.imag());
  Mat2 g;
  g << s, zeta.real() / s, 0.0, 1.0 / s;
  return g;
}

// Fiber of the projection over the basepoint: span_R{o, i e1, i e2} where
// e1 = (1,0,0), e2 = (0,1/2,-1) span the tangent plane of Sigma_0 at o.
inline Vec3 fiber_direction(double theta) {
  return cplx(0.0, 1.0) * Vec3(std::cos(theta), 0.5 * std::sin(theta), -std::sin(theta));
}

/// Point at distance s from the base point zeta in the fiber of the projection
/// onto the plane, in direction theta.
inline ProjPoint fiber_point(const TotallyRealPlane& plane, cplx zeta, double s, double theta) {
  const Vec3 o0(0.0, 0.5, 1.0);
  const Vec3 X = std::cosh(0.5 * s) * o0 + std::sinh(0.5 * s) * fiber_direction(theta);
  return (v_translation(plane.v_offset) * embed_so21(uhp_frame(zeta)))(ProjPoint(X));
}

/// Ideal endpoint of the fiber ray (s -> infinity).
inline ProjPoint fiber_boundary_point(const TotallyRealPlane& plane, cplx zeta, double theta) {
  const Vec3 o0(0.0, 0.5, 1.0);
  return (v_translation(plane.v_offset) * embed_so21(uhp_frame(zeta)))(ProjPoint(o0 + fiber_direction(theta)));
}

}  // namespace chyp
