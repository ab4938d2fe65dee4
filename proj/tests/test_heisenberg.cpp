#include <catch_amalgamated.hpp>

#include "chyp/heisenberg.hpp"
#include "chyp/rng.hpp"
#include "chyp/totally_real.hpp"

using namespace chyp;

namespace {

HoroCoord random_horo(Rng& rng, double umin = 0.0) {
  return HoroCoord::from_xyuv(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(umin, 5), rng.uniform(-5, 5));
}

bool close(const HoroCoord& a, const HoroCoord& b, double tol) {
  return std::abs(a.z - b.z) < tol && std::abs(a.u - b.u) < tol && std::abs(a.v - b.v) < tol;
}

}  // namespace

TEST_CASE("Heisenberg group law") {
  const HeisElem e{0.0, 0.0}, g{cplx(2, -1), 3.0};
  CHECK(heis_mul(e, g).z == g.z);
  CHECK(heis_mul(e, g).v == g.v);
  const HeisElem p = heis_mul({cplx(1, 0), 0}, {cplx(0, 1), 0});
  CHECK(p.z == cplx(1, 1));
  CHECK(p.v == -2.0);
  const HeisElem q = heis_mul(g, heis_inverse(g));
  CHECK(std::abs(q.z) == 0.0);
  CHECK(q.v == 0.0);

  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const HeisElem a{cplx(rng.normal(), rng.normal()), rng.normal()};
    const HeisElem b{cplx(rng.normal(), rng.normal()), rng.normal()};
    const HeisElem c{cplx(rng.normal(), rng.normal()), rng.normal()};
    const HeisElem l = heis_mul(heis_mul(a, b), c), r = heis_mul(a, heis_mul(b, c));
    REQUIRE(std::abs(l.z - r.z) < 1e-12);
    REQUIRE(std::abs(l.v - r.v) < 1e-12);
  }
}

TEST_CASE("H_r and V_t act by the coordinate formulas") {
  const HoroCoord p = to_horo(h_translation(2)(lift(HoroCoord::from_xyuv(1, 3, 5, 7))));
  CHECK(std::abs(p.z - cplx(3, 3)) < 1e-12);
  CHECK(std::abs(p.u - 5) < 1e-12);
  CHECK(std::abs(p.v + 5) < 1e-12);

  Rng rng(12);
  for (int i = 0; i < 10000; ++i) {
    const HoroCoord q = random_horo(rng);
    const double r = rng.uniform(-4, 4), t = rng.uniform(-4, 4);
    const HoroCoord hq = to_horo(h_translation(r)(lift(q)));
    REQUIRE(close(hq, HoroCoord::from_xyuv(q.x() + r, q.y(), q.u, q.v - 2 * r * q.y()), 1e-10));
    const HoroCoord vq = to_horo(v_translation(t)(lift(q)));
    REQUIRE(close(vq, HoroCoord::from_xyuv(q.x(), q.y(), q.u, q.v + t), 1e-10));
    const HeisElem g{cplx(rng.normal(), rng.normal()), rng.normal()};
    REQUIRE(close(to_horo(heis_translation(g)(lift(q))), heis_act(g, q), 1e-10));
  }
}

TEST_CASE("translations commute and form one-parameter subgroups") {
  for (double r : {0.5, 1.0, 6.0}) {
    for (double t : {-2.0, 1.0, 256.0}) {
      CHECK(distance_mod_scalar(v_translation(t) * h_translation(r), h_translation(r) * v_translation(t)) < 1e-12);
      CHECK(distance_mod_scalar(h_translation(r) * h_translation(t), h_translation(r + t)) < 1e-12);
    }
    CHECK(classify(h_translation(r)).kind == Kind::Parabolic);
    CHECK(h_translation(r)(ProjPoint::infinity()).is_infinity());
    CHECK(h_translation(r).unitarity_residual() < 1e-12);
  }
}

TEST_CASE("quotient map and section") {
  const QuotientCoord q = quotient_map(HoroCoord::from_xyuv(2, 1, 3, 4));
  CHECK(q.y == 1.0);
  CHECK(q.w == 8.0);
  CHECK(q.u == 3.0);
  const QuotientCoord q0 = quotient_map(HoroCoord::from_xyuv(0, -1.5, 2, 7));
  CHECK(q0.y == -1.5);
  CHECK(q0.w == 7.0);
  const HoroCoord s = section_P({1, 8, 3});
  CHECK(s.x() == 0.0);
  CHECK(s.y() == 1.0);
  CHECK(s.u == 3.0);
  CHECK(s.v == 8.0);

  Rng rng(13);
  for (int i = 0; i < 10000; ++i) {
    const HoroCoord p = random_horo(rng, 0.01);
    const QuotientCoord a = quotient_map(p);
    const QuotientCoord b = quotient_map(to_horo(h_translation(5)(lift(p))));
    REQUIRE(std::abs(a.w - b.w) < 1e-9);
    REQUIRE(std::abs(a.y - b.y) < 1e-12);
    REQUIRE(std::abs(a.u - b.u) < 1e-9);
    const QuotientCoord rt = quotient_map(section_P(a));
    REQUIRE((rt.y == a.y && rt.w == a.w && rt.u == a.u));
    const double t = rng.uniform(-3, 3);
    const QuotientCoord vt = quotient_map(to_horo(v_translation(t)(lift(p))));
    REQUIRE(std::abs(vt.w - v_translate(a, t).w) < 1e-9);
  }
}

TEST_CASE("projected horoball complements have bounded w-extent, monotone in the height cut") {
  // sample the fibres of the projection onto Sigma_0 over {u <= h^2}, x in [0,1]
  auto extent = [&](double h) {
    double lo = INFINITY, hi = -INFINITY;
    Rng local(15);
    for (int i = 0; i < 10000; ++i) {
      const double x = local.uniform(0, 1), eta = local.uniform(0.05, h);
      const ProjPoint b = fiber_boundary_point({}, cplx(x, eta), local.uniform(0, 2 * kPi));
      const QuotientCoord q = quotient_map(to_horo(b));
      lo = std::min(lo, q.w);
      hi = std::max(hi, q.w);
    }
    return hi - lo;
  };
  double prev = 0.0;
  for (double h : {0.5, 1.0, 2.0, 4.0}) {
    const double e = extent(h);
    CHECK(std::isfinite(e));
    CHECK(e >= prev);
    CHECK(e <= 1.3 * h * h * 2.0 + 1e-9);
    prev = e;
  }
}
