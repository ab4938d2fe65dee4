#include <catch_amalgamated.hpp>

#include "chyp/amalgam.hpp"

using namespace chyp;

namespace {

const AmalgamRep& torus_pair() {
  static const AmalgamRep rep = build({});
  return rep;
}

}  // namespace

TEST_CASE("default build") {
  const AmalgamRep& rep = torus_pair();
  CHECK(rep.t() == 256.0);
  CHECK(rep.v1 == 0.0);
  CHECK(rep.w_mid == 128.0);
  CHECK(rep.separation >= 0.5);
  CHECK(distance_mod_scalar(rep.rho("gamma"), h_translation(6.0)) < 1e-10);
  CHECK(distance_from_scalar(rep.rho(rep.presentation.relator()).matrix()) < 1e-9);
  CHECK(classify(rep.rho("gamma")).kind == Kind::Parabolic);
  CHECK(classify(rep.rho("a1")).kind == Kind::Loxodromic);
  CHECK(classify(rep.rho("a2 b2")).kind == Kind::Loxodromic);
  // factor 2 ends in d^-1
  CHECK(distance_mod_scalar(rep.rho(rep.presentation.factor_relator(1)), h_translation(-6.0)) < 1e-10);
  for (const Factor& f : rep.factors)
    for (const Isometry& g : f.images) CHECK(g.unitarity_residual() < 1e-9);
}

TEST_CASE("higher genus builds") {
  for (auto [g1, g2] : {std::pair{2, 1}, {1, 2}, {2, 2}}) {
    BuildOptions o;
    o.g1 = g1;
    o.g2 = g2;
    const AmalgamRep rep = build(o);
    INFO("genera " << g1 << ", " << g2);
    CHECK(distance_from_scalar(rep.rho(rep.presentation.relator()).matrix()) < 1e-9);
    CHECK(distance_mod_scalar(rep.rho("gamma"), h_translation(6.0)) < 1e-10);
    CHECK(distance_mod_scalar(rep.rho(rep.presentation.factor_relator(1)), h_translation(-6.0)) < 1e-9);
    CHECK(classify(rep.rho("gamma")).kind == Kind::Parabolic);
    // the factor at height t has entries of order t times the generators'
    for (const Factor& f : rep.factors)
      for (const Isometry& g : f.images) {
        const double s = std::max(1.0, max_abs(g.matrix()));
        CHECK(g.unitarity_residual() < 1e-12 * s * s);
      }
  }
}

TEST_CASE("products are formed per factor") {
  BuildOptions o;
  o.g2 = 2;
  const AmalgamRep rep = build(o);
  const Word u = rep.presentation.parse("a2 b3 a3^-1 b2 b2"), v = rep.presentation.parse("a1 b1^-1");
  // one syllable: equals the embedded SL(2) product
  Mat2 s = Mat2::Identity();
  for (Letter l : u) s = s * rep.factor_letter(1, l);
  CHECK(distance_mod_scalar(rep.rho(u), embed_so21(s, rep.factors[1].plane)) <= 1e-12 * max_abs(rep.rho(u).matrix()));
  // several syllables: the product of the syllables' images
  const Isometry whole = rep.rho(concat(concat(u, v), u));
  const Isometry parts = rep.rho(u) * rep.rho(v) * rep.rho(u);
  CHECK(distance_mod_scalar(whole, parts) <= 1e-9 * max_abs(parts.matrix()));
  CHECK(distance_from_scalar(rep.rho(concat(u, inverse(u))).matrix()) < 1e-8);
}

TEST_CASE("cyclic reduction") {
  const SurfacePresentation P{1, 1};
  CHECK(cyclic_reduce(P.parse("a1 b1 a1^-1")) == P.parse("b1"));
  CHECK(cyclic_reduce(P.parse("a2^-1 a1 a1^-1 b1 a2")) == P.parse("b1"));
  CHECK(cyclic_reduce(P.parse("a1 b1 a1 b1^-1")) == P.parse("a1 b1 a1 b1^-1"));
  CHECK(cyclic_reduce(P.parse("a1 a1^-1")).empty());
  CHECK(cyclic_reduce(P.parse("a1 b1 a1^-1 b1^-1")) == P.gamma());
}

TEST_CASE("explicit t and failures") {
  BuildOptions opt;
  opt.t = 64.0;
  const AmalgamRep rep = build(opt);
  CHECK(rep.t() == 64.0);
  CHECK(rep.separation < 0.5);
  BuildOptions bad;
  bad.r = 0.0;
  CHECK_THROWS_AS(build(bad), std::invalid_argument);
  bad = {};
  bad.g1 = 0;
  CHECK_THROWS_AS(build(bad), std::invalid_argument);
  bad = {};
  bad.margin = 1e9;
  CHECK_THROWS_AS(build(bad), SeparationError);
}

TEST_CASE("separation margin grows with t") {
  const AmalgamRep& rep = torus_pair();
  double prev = -INFINITY;
  for (double t : {1.0, 4.0, 16.0, 64.0, 256.0, 1024.0}) {
    const double m = separation_margin(rep.factors, t, 2000, 3);
    CHECK(m > prev);
    prev = m;
  }
  // linear in t with slope 1/2
  const double a = separation_margin(rep.factors, 512.0, 2000, 3), b = separation_margin(rep.factors, 1024.0, 2000, 3);
  CHECK(std::abs((b - a) - 256.0) < 1e-6);
}

TEST_CASE("normal forms") {
  const SurfacePresentation P{1, 1};
  const Word gamma = P.gamma();
  // a1 b1 a1^-1 b1^-1 is d, which is b2 a2 b2^-1 a2^-1 in factor 2
  const NormalForm nf = normal_form(P, P.parse("a2 gamma b2"));
  CHECK(nf.syllables.size() == 1);
  CHECK(nf.syllables[0].factor == 1);
  CHECK(to_string(nf.word()) == "a2 b2 a2 b2^-1 a2^-1 b2");

  CHECK(normal_form(P, P.relator()).is_trivial());
  CHECK(normal_form(P, P.parse("a1 a1^-1")).is_trivial());
  CHECK(*normal_form(P, gamma).d_power() == 1);
  CHECK(*normal_form(P, inverse(gamma)).d_power() == -1);
  CHECK(*normal_form(P, P.factor_relator(1)).d_power() == -1);
  CHECK(!normal_form(P, P.parse("a1 a2")).d_power());

  // interior <d>-syllables are absorbed
  const NormalForm mid = normal_form(P, P.parse("a1 a2 b2 a2^-1 b2^-1 b1"));
  for (const Syllable& s : mid.syllables) CHECK(!s.d_power);

  // every enumerated word is its own normal form and alternates
  long long count = 0;
  for_each_normal_form(P, 6, [&](const Word& w) {
    ++count;
    const NormalForm f = normal_form(P, w);
    REQUIRE(f.word() == w);
    for (size_t i = 1; i < f.syllables.size(); ++i) REQUIRE(f.syllables[i].factor != f.syllables[i - 1].factor);
    if (f.syllables.size() > 1)
      for (const Syllable& s : f.syllables) REQUIRE(!s.d_power);
  });
  CHECK(count > 1000);
}

TEST_CASE("normal form of a random word represents the same element") {
  const AmalgamRep& rep = torus_pair();
  Rng rng(41);
  for (int i = 0; i < 300; ++i) {
    Word w;
    const int len = rng.integer(1, 10);
    for (int k = 0; k < len; ++k) {
      if (rng.uniform() < 0.2) {
        const Word g = rng.integer(0, 1) ? rep.presentation.gamma() : inverse(rep.presentation.gamma());
        w.insert(w.end(), g.begin(), g.end());
      } else {
        w.push_back((rng.integer(0, 1) ? 1 : -1) * gen_letter(rng.integer(0, 3)));
      }
    }
    const NormalForm nf = normal_form(rep.presentation, w);
    const Isometry a = rep.rho(w), b = rep.rho(nf.word());
    REQUIRE(distance_mod_scalar(a, b) < 1e-9 * std::max(1.0, max_abs(a.matrix())));
  }
}

TEST_CASE("parsing words with the separating curve") {
  const SurfacePresentation P{1, 2};
  CHECK(P.num_generators() == 6);
  CHECK(P.parse("gamma") == Word{1, 2, -1, -2});
  CHECK(P.parse("a3 b3^-1") == Word{5, -6});
  CHECK_THROWS_AS(P.parse("a4"), std::invalid_argument);
}

TEST_CASE("regions") {
  const AmalgamRep& rep = torus_pair();
  CHECK(rep.region(HoroCoord::from_xyuv(0, 0, 1, 200)).region == Region::X1);
  CHECK(rep.region(HoroCoord::from_xyuv(0, 0, 1, 10)).region == Region::X2);
  CHECK(rep.region(HoroCoord::from_xyuv(0, 0, 1, 128)).tie);
  // the region depends on w = v + 2xy only
  CHECK(rep.region(HoroCoord::from_xyuv(2, 5, 1, 128 - 21)).region == Region::X2);
  CHECK(rep.region(HoroCoord::from_xyuv(2, 5, 1, 128 - 19)).region == Region::X1);
  CHECK(AmalgamRep::region_of(0) == Region::X1);
  CHECK(AmalgamRep::region_of(1) == Region::X2);
  CHECK(std::string(to_string(Region::X2)) == "X2");
}

TEST_CASE("section is continuous and d-equivariant") {
  const AmalgamRep& rep = torus_pair();
  const Section& S = rep.section;
  CHECK(S.w_lo > rep.v1);
  CHECK(S.w_hi < rep.v2);
  CHECK(S.blend(S.w_lo - 1) == 0.0);
  CHECK(S.blend(S.w_hi + 1) == 1.0);
  Rng rng(42);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const QuotientCoord q{rng.uniform(-2, 2), rng.uniform(-50, 300), rng.uniform(0.01, 10)};
    QuotientCoord q2 = q;
    q2.w += 1e-6;
    worst = std::max(worst, std::abs(S.x_of(q2) - S.x_of(q)));
    // points of S and d(S) share the quotient coordinates
    const HoroCoord p = S.point(q);
    const QuotientCoord back = quotient_map(p);
    REQUIRE(std::abs(back.y - q.y) < 1e-12);
    REQUIRE(std::abs(back.w - q.w) < 1e-9 * std::max(1.0, std::abs(q.w)));
    REQUIRE(std::abs(slab_coordinate(rep, p)) < 1e-9);
    const HoroCoord dp = to_horo(rep.d(lift(p)));
    REQUIRE(std::abs(slab_coordinate(rep, dp) - rep.r) < 1e-7);
  }
  CHECK(worst < 1e-4);
  // away from the blend band S is the unbounded side over each plane
  const QuotientCoord below{0.3, 1.0, 0.5};
  const HoroCoord p = S.point(below);
  const ProjPoint img = project(rep.factors[0].plane, lift(p));
  CHECK(std::abs(to_horo(img).x() - rep.factors[0].domain.unbounded_x0) < 1e-9);
}

TEST_CASE("fundamental region membership") {
  const AmalgamRep& rep = torus_pair();
  const HoroCoord high = rep.section.point({0.0, 5.0, 50.0}, 3.0);
  CHECK(membership(rep, phi(), lift(high)).inside());
  CHECK(membership(rep, fundamental_region(0), lift(high)).inside());
  const HoroCoord outside_slab = rep.section.point({0.0, 5.0, 50.0}, 7.0);
  CHECK(!membership(rep, phi(), lift(outside_slab)).inside());
  CHECK(slab_shift(rep, outside_slab) == -1);
  // just above Sigma_{v1}, under a bounded side
  const HoroCoord low = HoroCoord::from_xyuv(rep.factors[0].domain.sides[0].center, 0, 0.01, rep.v1);
  CHECK(bounded_margin(rep, 0, lift(low)) < 0.0);
  CHECK(!membership(rep, fundamental_region(0), lift(low)).inside());
}
