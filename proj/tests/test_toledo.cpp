#include <catch_amalgamated.hpp>

#include "chyp/toledo.hpp"

#include <sstream>

using namespace chyp;

namespace {

const AmalgamRep& torus_pair() {
  static const AmalgamRep rep = build({});
  return rep;
}

const KahlerForm& form() {
  static const KahlerForm f = calibrate();
  return f;
}

Isometry random_isometry(Rng& rng) {
  const double a = rng.uniform(0.5, 2.0), b = rng.uniform(-1, 1), c = rng.uniform(-1, 1);
  Mat2 m;
  m << a, b, c, (1.0 + b * c) / a;
  Mat3 rot = Mat3::Identity();
  const double th = rng.uniform(0, 2 * kPi);
  rot(0, 0) = std::polar(1.0, 2.0 * th);
  rot(1, 1) = std::polar(1.0, -th);
  rot(2, 2) = std::polar(1.0, -th);
  return heis_translation({cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.uniform(-1, 1)}) *
         embed_so21(m, {rng.uniform(-1, 1)}) * Isometry::from_su21(rot);
}

}  // namespace

TEST_CASE("calibration") {
  CHECK(form().lambda == -4.0);
  const AreaEstimate disk = disk_area(form(), true);
  CHECK(std::abs(disk.value - complex_disk_area(1.0)) < 1e-3 * complex_disk_area(1.0));
  CHECK(std::abs(complex_disk_area(1.0) - 3.4122762652) < 1e-9);
  CHECK(std::abs(disk_area(form(), false).value) < 1e-9);
  // larger disks follow the same law
  const AreaEstimate big = disk_area(form(), true, 2.0, 64);
  CHECK(std::abs(big.value - complex_disk_area(2.0)) < 1e-3 * complex_disk_area(2.0));
}

TEST_CASE("Hessian against the analytic values on the slice w1 = 0") {
  Rng rng(51);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(0.01, 100.0), y = rng.uniform(-50, 50);
    const auto H = form().hessian({0.0, cplx(x, y)});
    REQUIRE(std::abs(H[0][0] - cplx(-1.0 / (2.0 * x), 0.0)) < 1e-6 / (2.0 * x));
    REQUIRE(std::abs(H[1][1] - cplx(-1.0 / (4.0 * x * x), 0.0)) < 1e-6 / (4.0 * x * x));
    REQUIRE(std::abs(H[0][1]) < 1e-6 / x);
    // area form dRe w2 ^ dIm w2 / (Re w2)^2
    const double w = form()({0.0, cplx(x, y)}, {0.0, 1.0}, {0.0, cplx(0.0, 1.0)});
    REQUIRE(std::abs(w - 1.0 / (x * x)) < 1e-6 / (x * x));
  }
}

TEST_CASE("omega vanishes on totally real planes") {
  Rng rng(52);
  for (int i = 0; i < 500; ++i) {
    const TotallyRealPlane plane{rng.uniform(-5, 5)};
    const cplx z(rng.uniform(-3, 3), rng.uniform(0.1, 3));
    const SiegelPoint p = horo_to_siegel(uhp_to_plane(plane, z));
    // chart (xi + i eta) -> w1 = xi, w2 = (eta^2 + xi^2 - i v) / 2; unit
    // tangents, the plane carrying twice the upper half-plane metric
    const double n = 0.5 * z.imag();
    const Tangent X = {n, n * z.real()}, Y = {0.0, n * z.imag()};
    REQUIRE(std::abs(form()(p, X, Y)) < 1e-9);
  }
}

TEST_CASE("kahler area is invariant, alternating and additive") {
  auto F = [](double rho, double th) { return complex_disk_point(1.0, rho, th); };
  const SurfaceMesh disk = SurfaceMesh::from_map(F, 0.0, 1.0, 0.0, 2 * kPi, 32, 64);
  const double a = kahler_area(form(), disk);
  const double ra = kahler_area_estimate(form(), F, 0.0, 1.0, 0.0, 2 * kPi, 64, 128).value;
  Rng rng(53);
  for (int i = 0; i < 10; ++i) {
    const Isometry g = random_isometry(rng);
    auto G = [&](double rho, double th) { return to_siegel(g(lift(F(rho, th)))); };
    const double b = kahler_area_estimate(form(), G, 0.0, 1.0, 0.0, 2 * kPi, 64, 128).value;
    REQUIRE(std::abs(b - ra) < 1e-6 * std::abs(ra));
    // the transformed mesh agrees up to the discretization error
    REQUIRE(std::abs(kahler_area(form(), disk.transformed(g)) - a) < 1e-2 * std::abs(a));
  }
  CHECK(std::abs(kahler_area(form(), disk.flipped()) + a) < 1e-12 * std::abs(a));
  const double h1 = kahler_area(form(), SurfaceMesh::from_map(F, 0.0, 1.0, 0.0, kPi, 32, 32));
  const double h2 = kahler_area(form(), SurfaceMesh::from_map(F, 0.0, 1.0, kPi, 2 * kPi, 32, 32));
  CHECK(std::abs(h1 + h2 - a) < 1e-9 * std::abs(a));

  // a flat sheet in a real line direction only
  auto bad = [](double s, double t) { return SiegelPoint{cplx(s + t, 0.0), cplx(2.0 + s + t, 0.0)}; };
  CHECK_THROWS_AS(kahler_area(form(), SurfaceMesh::from_map(bad, 0, 1, 0, 1, 4, 4)), MeshError);
  CHECK_THROWS_AS(SurfaceMesh::from_map(F, 0, 1, 0, 1, 0, 4), MeshError);
}

TEST_CASE("annulus boundary lies in the totally real planes") {
  const AmalgamRep& rep = torus_pair();
  const Annulus E(rep);
  for (double xi : {0.0, 0.3, 0.9}) {
    const HoroCoord a = E.point(0.0, xi), b = E.point(1.0, xi);
    CHECK(std::abs(a.y()) < 1e-12);
    CHECK(std::abs(a.v - rep.v1) < 1e-9);
    CHECK(std::abs(a.u - rep.factors[0].horoballs.u_b()) < 1e-9);
    CHECK(std::abs(b.y()) < 1e-12);
    CHECK(std::abs(b.v - rep.v2) < 1e-9);
  }
  // the two boundary curves of a d-period are identified by d
  const HoroCoord e0 = E.point(0.4, 0.0), e1 = E.point(0.4, 1.0);
  const HoroCoord de0 = to_horo(rep.d(lift(e0)));
  CHECK(std::abs(de0.z - e1.z) < 1e-9);
  CHECK(std::abs(de0.v - e1.v) < 1e-9);
}

TEST_CASE("Toledo invariant vanishes") {
  const AmalgamRep& rep = torus_pair();
  const ToledoResult r = toledo_invariant(rep, form());
  CHECK(std::abs(r.tau) < 1e-2);
  CHECK(std::abs(r.tau) <= r.error);
  CHECK(r.abs_mass > 0.1);  // the integrand itself is not zero

  ToledoOptions coarse;
  coarse.ns = 64;
  coarse.nxi = 16;
  const ToledoResult c = toledo_invariant(rep, form(), coarse);
  CHECK(std::abs(c.tau - r.tau) <= c.error);

  for (double bf : {0.3, 0.7}) {
    BuildOptions opt;
    opt.blend_fraction = bf;
    const ToledoResult b = toledo_invariant(build(opt), form());
    CHECK(std::abs(b.tau - r.tau) < 2e-2);
  }
  ToledoOptions flat;
  flat.y_bulge = 0.0;
  flat.u_bulge = 0.0;
  CHECK(std::abs(toledo_invariant(rep, form(), flat).tau) < 1e-2);
}

TEST_CASE("subdivision into translates") {
  const AmalgamRep& rep = torus_pair();
  const ToledoResult whole = toledo_invariant(rep, form());
  for (int n : {2, 7}) {
    const SubdivisionResult s = subdivision_test(rep, form(), n);
    REQUIRE(s.pieces.size() == static_cast<size_t>(n));
    CHECK(s.max_relative_spread() < 1e-6);
    CHECK(std::abs(s.total - 2 * kPi * whole.tau) <= s.total_error + 2 * kPi * whole.error);
  }
  CHECK_THROWS(subdivision_test(rep, form(), 1));

  std::ostringstream os;
  write_pieces_csv(os, subdivision_test(rep, form(), 2));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "piece,integral,error");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}
