#pragma once

// The Kahler form from its potential, triangulated surfaces in Siegel
// coordinates, and the Toledo invariant of an AmalgamRep computed as the
// omega-area of the annulus E between the horocycles bounding b_1 and b_2.

#include "chyp/amalgam.hpp"

#include <array>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

namespace chyp {

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tangent vector in C^2 (Siegel coordinates w1, w2).
using Tangent = std::array<cplx, 2>;

/// omega = lambda * (i/2) d dbar phi with phi = log(-<s,s>), s = (w1, w2, 1).
/// On real tangent vectors this is omega(X, Y) = -lambda * Im H(X, Y), H the
/// complex Hessian of phi.
struct KahlerForm {
  double lambda = -4.0;
  double rel_step = 1e-3;

  static double potential(const cplx& w1, const cplx& w2) { return std::log(2.0 * w2.real() - std::norm(w1)); }

  /// Complex Hessian h_{jk} = d_j dbar_k phi by fourth-order central
  /// differences.  Steps are scaled to the point: phi only varies on the
  /// scale of Q = 2 Re w2 - |w1|^2, which sets the w2 step, and on Q / |w1|
  /// (or sqrt Q) for w1.
  std::array<std::array<cplx, 2>, 2> hessian(const SiegelPoint& p) const {
    const double Q = 2.0 * p.w2.real() - std::norm(p.w1);
    if (!(Q > 0.0)) throw DomainError("KahlerForm: point outside the Siegel domain");
    const double s1 = std::min(std::sqrt(Q), Q / std::max(std::abs(p.w1), 1e-300));
    const std::array<double, 4> h = {rel_step * s1, rel_step * s1, rel_step * Q, rel_step * Q};
    auto f = [&](const std::array<double, 4>& d) {
      return potential(p.w1 + cplx(d[0], d[1]), p.w2 + cplx(d[2], d[3]));
    };
    static constexpr std::array<double, 4> off = {-2.0, -1.0, 1.0, 2.0};
    static constexpr std::array<double, 4> wd = {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
    static constexpr std::array<double, 5> w2nd = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};
    double D[4][4];
    const double f0 = f({0, 0, 0, 0});
    for (int a = 0; a < 4; ++a) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) {
        std::array<double, 4> d{};
        d[a] = k * h[a];
        acc += w2nd[k + 2] * (k == 0 ? f0 : f(d));
      }
      D[a][a] = acc / (h[a] * h[a]);
      for (int b = a + 1; b < 4; ++b) {
        double m = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            std::array<double, 4> d{};
            d[a] = off[i] * h[a];
            d[b] = off[j] * h[b];
            m += wd[i] * wd[j] * f(d);
          }
        D[a][b] = D[b][a] = m / (h[a] * h[b]);
      }
    }
    // real coordinates (Re w1, Im w1, Re w2, Im w2)
    std::array<std::array<cplx, 2>, 2> H;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const int aj = 2 * j, bj = 2 * j + 1, ak = 2 * k, bk = 2 * k + 1;
        H[j][k] = 0.25 * cplx(D[aj][ak] + D[bj][bk], D[aj][bk] - D[bj][ak]);
      }
    return H;
  }

  double operator()(const SiegelPoint& p, const Tangent& X, const Tangent& Y) const {
    const auto H = hessian(p);
    cplx s = 0.0;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) s += H[j][k] * X[j] * std::conj(Y[k]);
    return -lambda * s.imag();
  }
};

// ---------------------------------------------------------------------------

/// Surface given by its vertices on an (ns+1) x (nt+1) parameter grid, each
/// cell split into two triangles.  Orientation is that of (s, t).
struct SurfaceMesh {
  int ns = 0, nt = 0;
  std::vector<SiegelPoint> vertices;

  const SiegelPoint& at(int i, int j) const { return vertices[static_cast<size_t>(i) * (nt + 1) + j]; }

  template <class Map>
  static SurfaceMesh from_map(Map&& F, double s0, double s1, double t0, double t1, int ns, int nt) {
    if (ns < 1 || nt < 1) throw MeshError("SurfaceMesh: resolution must be positive");
    SurfaceMesh m;
    m.ns = ns;
    m.nt = nt;
    m.vertices.reserve(static_cast<size_t>(ns + 1) * (nt + 1));
    for (int i = 0; i <= ns; ++i)
      for (int j = 0; j <= nt; ++j) m.vertices.push_back(F(s0 + (s1 - s0) * i / ns, t0 + (t1 - t0) * j / nt));
    return m;
  }

  SurfaceMesh transformed(const Isometry& g) const {
    SurfaceMesh out = *this;
    for (SiegelPoint& p : out.vertices) p = to_siegel(g(lift(p)));
    return out;
  }

  /// Same surface with the parameters swapped: reverses the orientation.
  SurfaceMesh flipped() const {
    SurfaceMesh out;
    out.ns = nt;
    out.nt = ns;
    out.vertices.reserve(vertices.size());
    for (int j = 0; j <= nt; ++j)
      for (int i = 0; i <= ns; ++i) out.vertices.push_back(at(i, j));
    return out;
  }
};

inline double pairwise_sum(const double* x, size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

struct AreaSums {
  double value = 0.0;
  double abs_mass = 0.0;  // sum of |contribution|
};

/// Piecewise-linear integral: each triangle contributes (1/2) omega(e1, e2)
/// at its centroid.  Triangles with a collapsed edge (parameter poles) are
/// skipped; any other degeneracy is an error.
inline AreaSums kahler_sums(const KahlerForm& form, const SurfaceMesh& mesh) {
  std::vector<double> c;
  c.reserve(static_cast<size_t>(2) * mesh.ns * mesh.nt);
  auto tri = [&](const SiegelPoint& a, const SiegelPoint& b, const SiegelPoint& d) {
    for (const SiegelPoint* p : {&a, &b, &d})
      if (!std::isfinite(p->w1.real()) || !std::isfinite(p->w1.imag()) || !std::isfinite(p->w2.real()) ||
          !std::isfinite(p->w2.imag()))
        throw MeshError("SurfaceMesh: non-finite vertex");
    const Tangent X = {b.w1 - a.w1, b.w2 - a.w2}, Y = {d.w1 - a.w1, d.w2 - a.w2};
    const Tangent Z = {d.w1 - b.w1, d.w2 - b.w2};
    auto norm = [](const Tangent& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); };
    if (norm(X) == 0.0 || norm(Y) == 0.0 || norm(Z) == 0.0) return;
    // Gram determinant of the real 4-vectors
    auto dot = [](const Tangent& u, const Tangent& v) { return (u[0] * std::conj(v[0]) + u[1] * std::conj(v[1])).real(); };
    const double g = dot(X, X) * dot(Y, Y) - dot(X, Y) * dot(X, Y);
    if (!(g > 1e-24 * dot(X, X) * dot(Y, Y))) throw MeshError("SurfaceMesh: degenerate triangle");
    const SiegelPoint cen{(a.w1 + b.w1 + d.w1) / 3.0, (a.w2 + b.w2 + d.w2) / 3.0};
    c.push_back(0.5 * form(cen, X, Y));
  };
  for (int i = 0; i < mesh.ns; ++i)
    for (int j = 0; j < mesh.nt; ++j) {
      const SiegelPoint &p00 = mesh.at(i, j), &p10 = mesh.at(i + 1, j), &p01 = mesh.at(i, j + 1),
                        &p11 = mesh.at(i + 1, j + 1);
      tri(p00, p10, p11);
      tri(p00, p11, p01);
    }
  AreaSums out;
  out.value = pairwise_sum(c.data(), c.size());
  for (double& x : c) x = std::abs(x);
  out.abs_mass = pairwise_sum(c.data(), c.size());
  return out;
}

inline double kahler_area(const KahlerForm& form, const SurfaceMesh& mesh) { return kahler_sums(form, mesh).value; }

/// Two resolutions and their Richardson combination (the scheme is second
/// order), plus the error of the finite-difference form itself: the change
/// when the difference step is doubled (truncation, fourth order) and a
/// roundoff bound growing like eps / step^2.
struct AreaEstimate {
  double value = 0.0;
  double coarse = 0.0, fine = 0.0;
  double mesh_error = 0.0;
  double fd_error = 0.0;
  double error = 0.0;
  double abs_mass = 0.0;
};

inline AreaEstimate combine(const KahlerForm& form, const AreaSums& coarse, const AreaSums& fine,
                            const AreaSums& fine_wide_step) {
  AreaEstimate e;
  e.coarse = coarse.value;
  e.fine = fine.value;
  e.value = (4.0 * fine.value - coarse.value) / 3.0;
  e.abs_mass = fine.abs_mass;
  e.mesh_error = std::abs(fine.value - coarse.value) / 3.0;
  const double eps = std::numeric_limits<double>::epsilon();
  e.fd_error = std::abs(fine_wide_step.value - fine.value) + 16.0 * eps / (form.rel_step * form.rel_step) * fine.abs_mass;
  e.error = e.mesh_error + e.fd_error;
  return e;
}

template <class Map>
AreaEstimate kahler_area_estimate(const KahlerForm& form, Map&& F, double s0, double s1, double t0, double t1, int ns,
                                  int nt) {
  KahlerForm wide = form;
  wide.rel_step *= 2.0;
  const SurfaceMesh fine = SurfaceMesh::from_map(F, s0, s1, t0, t1, 2 * ns, 2 * nt);
  return combine(form, kahler_sums(form, SurfaceMesh::from_map(F, s0, s1, t0, t1, ns, nt)), kahler_sums(form, fine),
                 kahler_sums(wide, fine));
}

// ---------------------------------------------------------------------------
// Calibration.

/// Geodesic disk of radius R in the complex geodesic {w1 = 0}, centred at
/// w2 = 1/2, in polar coordinates (rho, theta).
inline SiegelPoint complex_disk_point(double R, double rho, double theta) {
  const cplx zeta = std::polar(std::tanh(0.5 * rho * R), theta);
  return {0.0, 0.5 * (1.0 + zeta) / (1.0 - zeta)};
}

/// Geodesic disk of radius R in Sigma_0 around the point over i.
inline SiegelPoint real_disk_point(double R, double rho, double theta) {
  // plane distance is twice the UHP distance
  const cplx zeta = std::polar(std::tanh(0.25 * rho * R), theta);
  const cplx z = cplx(0.0, 1.0) * (1.0 + zeta) / (1.0 - zeta);
  return horo_to_siegel(uhp_to_plane({}, z));
}

inline double complex_disk_area(double R) { return 2.0 * kPi * (std::cosh(R) - 1.0); }

inline AreaEstimate disk_area(const KahlerForm& form, bool complex_disk, double R = 1.0, int n = 48) {
  auto F = [&](double rho, double th) {
    return complex_disk ? complex_disk_point(R, rho, th) : real_disk_point(R, rho, th);
  };
  return kahler_area_estimate(form, F, 0.0, 1.0, 0.0, 2.0 * kPi, n, 2 * n);
}

/// Picks lambda from {+-1, +-2, +-4} so that the unit complex-geodesic disk
/// has area 2 pi (cosh 1 - 1) within 1e-3 relative.
inline KahlerForm calibrate() {
  const double target = complex_disk_area(1.0);
  for (double lam : {1.0, -1.0, 2.0, -2.0, 4.0, -4.0}) {
    KahlerForm f;
    f.lambda = lam;
    const double a = disk_area(f, true, 1.0, 32).value;
    if (std::abs(a - target) < 1e-3 * target) return f;
  }
  throw CalibrationError("calibrate: no candidate constant reproduces the disk area");
}

// ---------------------------------------------------------------------------
// The annulus E and the Toledo invariant.

/// E is parameterized by sigma in [0, 1] across the slab and xi in [0, 1]
/// along the d-orbit: E(sigma, xi) = H_{X_S(q) + xi r} section_P(q(sigma)),
/// where q runs from (0, v1, u_b) to (0, v2, u_b).  Its boundary curves are
/// the horocycles of height h_b in Sigma_{v1} and Sigma_{v2}.  The path
/// bulges out of y = 0: on the flat path omega vanishes identically, while
/// any annulus with these boundary curves has the same integral.
struct Annulus {
  const AmalgamRep* rep = nullptr;
  double u = 0.0;
  double y_bulge = 1.0;
  double u_bulge = 1.0;  // relative

  explicit Annulus(const AmalgamRep& r, double y_amp = 1.0, double u_amp = 1.0)
      : rep(&r), u(std::max(r.factors[0].horoballs.u_b(), r.factors[1].horoballs.u_b())), y_bulge(y_amp),
        u_bulge(u_amp) {}

  QuotientCoord q(double sigma) const {
    const double b = std::sin(kPi * sigma);
    return {y_bulge * b, rep->v1 + sigma * (rep->v2 - rep->v1), u * (1.0 + u_bulge * b)};
  }

  HoroCoord point(double sigma, double xi) const { return rep->section.point(q(sigma), xi * rep->r); }

  SiegelPoint operator()(double sigma, double xi) const { return horo_to_siegel(point(sigma, xi)); }
};

struct ToledoOptions {
  int ns = 128;  // across the slab
  int nxi = 32;  // along one d-period
  double y_bulge = 1.0;
  double u_bulge = 1.0;
};

struct ToledoResult {
  double tau = 0.0;
  double error = 0.0;  // error bar on tau: mesh (Richardson) plus finite-difference
  double integral = 0.0;
  double coarse = 0.0, fine = 0.0;
  double mesh_error = 0.0, fd_error = 0.0;  // on the integral
  double abs_mass = 0.0;
  ToledoOptions resolution;
  std::vector<double> per_piece;
};

inline ToledoResult toledo_invariant(const AmalgamRep& rep, const KahlerForm& form, ToledoOptions opt = {}) {
  if (!(rep.section.w_hi > rep.section.w_lo)) throw std::invalid_argument("toledo_invariant: section not built");
  const Annulus E(rep, opt.y_bulge, opt.u_bulge);
  const AreaEstimate a = kahler_area_estimate(form, E, 0.0, 1.0, 0.0, 1.0, opt.ns, opt.nxi);
  ToledoResult r;
  r.integral = a.value;
  r.tau = a.value / (2.0 * kPi);
  r.error = a.error / (2.0 * kPi);
  r.coarse = a.coarse;
  r.fine = a.fine;
  r.mesh_error = a.mesh_error;
  r.fd_error = a.fd_error;
  r.abs_mass = a.abs_mass;
  r.resolution = opt;
  r.per_piece = {a.value};
  return r;
}

inline ToledoResult toledo_invariant(const AmalgamRep& rep, ToledoOptions opt = {}) {
  return toledo_invariant(rep, calibrate(), opt);
}

struct SubdivisionResult {
  int n = 0;
  std::vector<AreaEstimate> pieces;
  double total = 0.0;       // sum of the piece integrals
  double total_error = 0.0;
  double abs_mass = 0.0;    // of the whole annulus
  /// Largest pairwise difference between pieces relative to a piece's
  /// absolute mass.
  double max_relative_spread() const {
    double lo = INFINITY, hi = -INFINITY, mass = 0.0;
    for (const AreaEstimate& p : pieces) {
      lo = std::min(lo, p.value);
      hi = std::max(hi, p.value);
      mass = std::max(mass, p.abs_mass);
    }
    return pieces.empty() || mass == 0.0 ? 0.0 : (hi - lo) / mass;
  }
};

/// Splits E into E_i between H_{is}(e) and H_{(i+1)s}(e), s = r / n.
inline SubdivisionResult subdivision_test(const AmalgamRep& rep, const KahlerForm& form, int n, ToledoOptions opt = {}) {
  if (n < 2) throw std::invalid_argument("subdivision_test: n must be >= 2");
  const Annulus E(rep, opt.y_bulge, opt.u_bulge);
  SubdivisionResult out;
  out.n = n;
  const int nxi = std::max(2, (opt.nxi + n - 1) / n);
  for (int i = 0; i < n; ++i) {
    const AreaEstimate a =
        kahler_area_estimate(form, E, 0.0, 1.0, static_cast<double>(i) / n, static_cast<double>(i + 1) / n, opt.ns, nxi);
    out.pieces.push_back(a);
    out.total += a.value;
    out.total_error += a.error;
    out.abs_mass += a.abs_mass;
  }
  return out;
}

/// CSV: piece,integral,error
inline void write_pieces_csv(std::ostream& os, const SubdivisionResult& s) {
  char buf[128];
  os << "piece,integral,error\n";
  for (size_t i = 0; i < s.pieces.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, s.pieces[i].value, s.pieces[i].error);
    os << buf;
  }
}

}  // namespace chyp
