#pragma once

// Hermitian linear algebra on C^3 with a form of signature (2,1), the three
// point models of the complex hyperbolic plane (projective lifts, Siegel
// domain, horospherical coordinates), the Bergman distance, and PU(2,1)
// isometries with their elliptic/parabolic/loxodromic classification.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace chyp {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInteriorTol = 1e-10;
inline constexpr double kClassifyTol = 1e-9;
inline constexpr double kUnitarityTol = 1e-12;

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a coordinate chart is asked for the point at infinity.
struct InfinityError : GeometryError {
  using GeometryError::GeometryError;
};

/// Raised when an interior-only operation receives a boundary or exterior point.
struct DomainError : GeometryError {
  using GeometryError::GeometryError;
};

struct DegeneracyError : GeometryError {
  using GeometryError::GeometryError;
};

// <a,b> = a1 conj(b1) - a2 conj(b3) - a3 conj(b2).  With this form the lift
// (w1, w2, 1) is negative exactly on the Siegel domain |w1|^2 < w2 + conj(w2).
inline cplx herm(const Vec3& a, const Vec3& b) {
  return a[0] * std::conj(b[0]) - a[1] * std::conj(b[2]) - a[2] * std::conj(b[1]);
}

inline const Mat3& form_matrix() {
  static const Mat3 J = [] {
    Mat3 m = Mat3::Zero();
    m(0, 0) = 1.0;
    m(1, 2) = -1.0;
    m(2, 1) = -1.0;
    return m;
  }();
  return J;
}

inline double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

struct SiegelPoint {
  cplx w1;
  cplx w2;
};

/// Horospherical coordinates (z = x + iy, u, v); u > 0 inside, u = 0 on the
/// boundary minus infinity.
struct HoroCoord {
  cplx z;
  double u = 0.0;
  double v = 0.0;

  double x() const { return z.real(); }
  double y() const { return z.imag(); }

  static HoroCoord from_xyuv(double x, double y, double u, double v) { return {cplx(x, y), u, v}; }
};

// u + iv = 2 conj(w2) - |w1|^2, z = w1.
inline SiegelPoint horo_to_siegel(const HoroCoord& p) {
  return {p.z, 0.5 * cplx(p.u + std::norm(p.z), -p.v)};
}

inline HoroCoord siegel_to_horo(const SiegelPoint& q, double tol = kInteriorTol) {
  const double u = 2.0 * q.w2.real() - std::norm(q.w1);
  if (u < -tol * std::max(1.0, std::abs(q.w2)))
    throw DomainError("siegel_to_horo: point lies outside the closed Siegel domain");
  return {q.w1, u, -2.0 * q.w2.imag()};
}

/// A point of the projectivized C^3: a lift that is never the zero vector.
class ProjPoint {
 public:
  ProjPoint() : lift_(0.0, 1.0, 0.0) {}
  explicit ProjPoint(const Vec3& lift) : lift_(lift) {
    if (lift.squaredNorm() == 0.0) throw DegeneracyError("ProjPoint: zero lift");
  }

  static ProjPoint infinity() { return ProjPoint(Vec3(0.0, 1.0, 0.0)); }

  const Vec3& lift() const { return lift_; }

  /// Self-pairing of the unit-norm representative; scale invariant.
  double normalized_self_pairing() const { return herm(lift_, lift_).real() / lift_.squaredNorm(); }

  bool is_interior(double tol = kInteriorTol) const { return normalized_self_pairing() < -tol; }
  bool is_boundary(double tol = kInteriorTol) const {
    return std::abs(normalized_self_pairing()) <= tol;
  }
  bool is_infinity(double tol = kInteriorTol) const {
    return std::abs(lift_[2]) <= tol * lift_.norm();
  }

  ProjPoint normalized() const { return ProjPoint(lift_ / lift_.norm()); }

 private:
  Vec3 lift_;
};

inline ProjPoint lift(const SiegelPoint& q) { return ProjPoint(Vec3(q.w1, q.w2, 1.0)); }
inline ProjPoint lift(const HoroCoord& p) { return lift(horo_to_siegel(p)); }

inline SiegelPoint to_siegel(const ProjPoint& p) {
  if (p.is_infinity(1e-300)) throw InfinityError("point at infinity has no Siegel coordinates");
  const Vec3& X = p.lift();
  return {X[0] / X[2], X[1] / X[2]};
}

inline HoroCoord to_horo(const ProjPoint& p) {
  const SiegelPoint q = to_siegel(p);
  // no domain check here: boundary points come out with u ~ 0 of either sign
  return {q.w1, 2.0 * q.w2.real() - std::norm(q.w1), -2.0 * q.w2.imag()};
}

/// Bergman distance, normalized so cosh^2(d/2) = <p,q><q,p> / (<p,p><q,q>);
/// complex geodesics have curvature -1 and totally real planes -1/4.
inline double dist(const ProjPoint& p, const ProjPoint& q, double tol = kInteriorTol) {
  if (!p.is_interior(tol) || !q.is_interior(tol))
    throw DomainError("dist: both points must be interior");
  // unit lifts with <P,Q> real negative; then <P-Q,P-Q> = 4 sinh^2(d/4), which
  // keeps full relative accuracy for nearby points
  const Vec3 P = p.lift() / std::sqrt(-herm(p.lift(), p.lift()).real());
  Vec3 Q = q.lift() / std::sqrt(-herm(q.lift(), q.lift()).real());
  const cplx pq = herm(P, Q);
  if (std::abs(pq) > 0.0) Q *= -pq / std::abs(pq);
  const Vec3 D = P - Q;
  const double s = herm(D, D).real();
  return 4.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, s)));
}

/// Element of PU(2,1), stored as a representative in SU(2,1).
class Isometry {
 public:
  Isometry() : m_(Mat3::Identity()) {}

  /// Scales by a cube root of the determinant; the result is checked against
  /// the form only through unitarity_residual(), never silently repaired.
  static Isometry from_matrix(const Mat3& m) {
    const cplx det = m.determinant();
    if (std::abs(det) == 0.0) throw DegeneracyError("Isometry: singular matrix");
    if (det == cplx(1.0, 0.0)) return Isometry(m, Raw{});
    return Isometry(m / std::pow(det, 1.0 / 3.0), Raw{});
  }

  /// Wraps a matrix already known to have determinant one.
  static Isometry from_su21(const Mat3& m) { return Isometry(m, Raw{}); }

  static Isometry identity() { return Isometry(); }

  const Mat3& matrix() const { return m_; }

  Isometry operator*(const Isometry& o) const { return Isometry(m_ * o.m_, Raw{}); }

  // For M in U(2,1): M^-1 = J M^* J.
  Isometry inverse() const {
    const Mat3& J = form_matrix();
    return Isometry(J * m_.adjoint() * J, Raw{});
  }

  ProjPoint apply(const ProjPoint& p) const { return ProjPoint(m_ * p.lift()); }
  ProjPoint operator()(const ProjPoint& p) const { return apply(p); }

  double unitarity_residual() const {
    const Mat3& J = form_matrix();
    return max_abs(m_.adjoint() * J * m_ - J);
  }

 private:
  struct Raw {};
  Isometry(const Mat3& m, Raw) : m_(m) {}
  Mat3 m_;
};

inline const std::array<cplx, 3>& cube_roots_of_unity() {
  static const std::array<cplx, 3> roots = {cplx(1.0, 0.0), std::polar(1.0, 2.0 * kPi / 3.0),
                                            std::polar(1.0, 4.0 * kPi / 3.0)};
  return roots;
}

/// Max-norm distance from m to the nearest of the three scalar matrices in SU(2,1).
inline double distance_from_scalar(const Mat3& m) {
  double best = INFINITY;
  for (const cplx& w : cube_roots_of_unity())
    best = std::min(best, max_abs(m - w * Mat3::Identity()));
  return best;
}

/// Max-norm distance between a and b in PU(2,1), i.e. modulo the centre of SU(2,1).
inline double distance_mod_scalar(const Isometry& a, const Isometry& b) {
  double best = INFINITY;
  for (const cplx& w : cube_roots_of_unity())
    best = std::min(best, max_abs(a.matrix() - w * b.matrix()));
  return best;
}

inline bool equal_mod_scalar(const Isometry& a, const Isometry& b, double tol) {
  return distance_mod_scalar(a, b) <= tol;
}

enum class Kind { Identity, Elliptic, Parabolic, Loxodromic };

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::Identity: return "Identity";
    case Kind::Elliptic: return "Elliptic";
    case Kind::Parabolic: return "Parabolic";
    case Kind::Loxodromic: return "Loxodromic";
  }
  return "?";
}

struct IsometryKind {
  Kind kind = Kind::Identity;
  cplx trace;
  double discriminant = 0.0;
};

// Goldman's discriminant of the characteristic polynomial of an SU(2,1) matrix.
inline double trace_discriminant(cplx tr) {
  const double a2 = std::norm(tr);
  return a2 * a2 - 8.0 * std::real(tr * tr * tr) + 18.0 * a2 - 27.0;
}

inline IsometryKind classify(const Isometry& g, double tol = kClassifyTol) {
  const Mat3& m = g.matrix();
  const cplx tr = m.trace();
  const double f = trace_discriminant(tr);
  if (f > tol) return {Kind::Loxodromic, tr, f};
  if (f < -tol) return {Kind::Elliptic, tr, f};

  const double scale = std::max(1.0, max_abs(m));
  if (distance_from_scalar(m) <= 1e-8 * scale) return {Kind::Identity, tr, f};

  // Repeated eigenvalue: the root of p'(x) = 3x^2 - 2 tr x + conj(tr) at which
  // p(x) = x^3 - tr x^2 + conj(tr) x - 1 is smallest.
  const cplx disc = std::sqrt(4.0 * tr * tr - 12.0 * std::conj(tr));
  const cplx c1 = (2.0 * tr + disc) / 6.0;
  const cplx c2 = (2.0 * tr - disc) / 6.0;
  auto p = [&](cplx x) { return x * x * x - tr * x * x + std::conj(tr) * x - 1.0; };
  const cplx lam = std::abs(p(c1)) <= std::abs(p(c2)) ? c1 : c2;
  const cplx mu = 1.0 / (lam * lam);
  const Mat3 I = Mat3::Identity();
  // the witness is linear in m for a triple eigenvalue, quadratic otherwise
  Mat3 witness;
  double thresh;
  if (std::abs(lam - mu) < 1e-4) {
    witness = m - lam * I;  // diagonalizable would mean scalar
    thresh = 1e-6 * scale;
  } else {
    witness = (m - lam * I) * (m - mu * I);
    thresh = 1e-6 * scale * scale;
  }
  if (max_abs(witness) > thresh) return {Kind::Parabolic, tr, f};
  return {Kind::Elliptic, tr, f};
}

}  // namespace chyp
