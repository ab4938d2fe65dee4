#include <catch_amalgamated.hpp>

#include "chyp/fuchsian.hpp"
#include "chyp/rng.hpp"

#include <set>

using namespace chyp;

namespace {

Mat2 translation(double r) { return mat2(1.0, r, 0.0, 1.0); }

std::multiset<long long> trace_set(const FuchsianGroup& G) {
  // |trace| of generators and of products of pairs, rounded: conjugacy invariants
  std::multiset<long long> s;
  const int n = G.num_generators();
  for (int i = 0; i < n; ++i) {
    s.insert(std::llround(std::abs(G.generators[i].trace()) * 1e6));
    for (int j = i + 1; j < n; ++j) {
      s.insert(std::llround(std::abs((G.generators[i] * G.generators[j]).trace()) * 1e6));
      s.insert(std::llround(std::abs((G.generators[i] * inverse_sl2(G.generators[j])).trace()) * 1e6));
    }
  }
  return s;
}

Word random_reduced_word(Rng& rng, int gens, int len) {
  Word w;
  while (static_cast<int>(w.size()) < len) {
    const Letter l = (rng.integer(0, 1) ? 1 : -1) * gen_letter(rng.integer(0, gens - 1));
    if (!w.empty() && w.back() == -l) continue;
    w.push_back(l);
  }
  return w;
}

}  // namespace

TEST_CASE("word utilities") {
  CHECK(free_reduce({1, 2, -2, -1, 3}) == Word{3});
  CHECK(inverse({1, -2, 3}) == Word{-3, 2, -1});
  CHECK(commutator_product(0, 2) == Word{1, 2, -1, -2, 3, 4, -3, -4});
  CHECK(parse_word("a1 b1^-1 a2", 4) == Word{1, -2, 3});
  CHECK(to_string(Word{1, -2, 3}) == "a1 b1^-1 a2");
  CHECK_THROWS_AS(parse_word("a3", 4), std::invalid_argument);
  CHECK_THROWS_AS(parse_word("c1", 4), std::invalid_argument);
  CHECK_THROWS_AS(parse_word("a1^2", 4), std::invalid_argument);
  CHECK(power({1, 2}, -2) == Word{-2, -1, -2, -1});

  int count = 0;
  for_each_reduced_word(2, 3, [&](const Word& w) {
    ++count;
    REQUIRE(free_reduce(w) == w);
    return true;
  });
  CHECK(count == 4 + 12 + 36);
}

TEST_CASE("punctured torus") {
  const Mat2 A = mat2(1, 1, 1, 2), B = mat2(1, -1, -1, 2);
  const Mat2 C = A * B * inverse_sl2(A) * inverse_sl2(B);
  CHECK(C == mat2(-1, 0, -6, -1));
  CHECK(C.trace() == -2.0);

  for (double r : {6.0, 1.0, 3.7}) {
    const FuchsianGroup G = punctured_torus(r);
    CHECK(G.genus == 1);
    CHECK(G.cusp_length == r);
    const Mat2 P = G.relator_matrix();
    CHECK(std::min((P - translation(r)).cwiseAbs().maxCoeff(), (P + translation(r)).cwiseAbs().maxCoeff()) < 1e-10);
    for (const Mat2& g : G.generators) {
      CHECK(std::abs(g.trace()) > 2.0);
      CHECK(std::abs(g.determinant() - 1.0) < 1e-12);
    }
  }
  // r = 6 needs no rescaling: integer matrices
  const FuchsianGroup G6 = punctured_torus(6.0);
  CHECK(G6.generators[0] == mat2(2, 1, 1, 1));
  CHECK(G6.generators[1] == mat2(2, -1, -1, 1));
  CHECK_THROWS(punctured_torus(0.0));
}

TEST_CASE("ideal polygon groups") {
  const FuchsianGroup T = ideal_polygon_group(1, 6.0);
  CHECK(trace_set(T) == trace_set(punctured_torus(6.0)));

  for (int g : {1, 2, 3}) {
    const double r = 6.0;
    const FuchsianGroup G = ideal_polygon_group(g, r);
    CHECK(G.num_generators() == 2 * g);
    const Mat2 P = G.relator_matrix();
    CHECK(std::abs(std::abs(P.trace()) - 2.0) < 1e-9);
    CHECK(std::min((P - translation(r)).cwiseAbs().maxCoeff(), (P + translation(r)).cwiseAbs().maxCoeff()) < 1e-10);
    for (const Mat2& m : G.generators) CHECK(std::abs(m.trace()) > 2.0);
  }

  const FuchsianGroup G2 = ideal_polygon_group(2, 6.0);
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const Word w = random_reduced_word(rng, 4, rng.integer(1, 12));
    REQUIRE(distance_from_pm_identity(G2.evaluate(w)) > 1e-6);
  }
  CHECK_THROWS(ideal_polygon_group(0, 6.0));
}

TEST_CASE("free group evidence up to length 8") {
  const FuchsianGroup G = punctured_torus(6.0);
  std::vector<Mat2> stack{Mat2::Identity()};
  double closest = INFINITY;
  long long n = 0;
  for_each_reduced_word(2, 8, [&](const Word& w) {
    stack.resize(w.size());
    stack.push_back(G.letter(w.front()) * stack.back());
    closest = std::min(closest, distance_from_pm_identity(stack.back()));
    ++n;
    return true;
  });
  CHECK(n == 2 * (6561 - 1));
  CHECK(closest > 1e-6);
}

TEST_CASE("mirror reverses the cusp translation") {
  const FuchsianGroup M = mirror(punctured_torus(6.0));
  CHECK(M.orientation == -1);
  const Mat2 P = M.relator_matrix();
  CHECK(std::min((P - translation(-6)).cwiseAbs().maxCoeff(), (P + translation(-6)).cwiseAbs().maxCoeff()) < 1e-12);
}

TEST_CASE("Ford domain of the punctured torus") {
  const FuchsianGroup G = punctured_torus(6.0);
  const FundamentalData F = fundamental_data(G);
  CHECK(F.width == 6.0);
  CHECK(F.sides.size() == 6);
  CHECK(std::abs(F.max_height - 1.0) < 1e-12);
  CHECK(std::abs(F.unbounded_x0 - std::round(F.unbounded_x0 - 0.5) - 0.5) < 1e-12);
  for (const BoundedSide& s : F.sides) {
    CHECK(std::abs(s.radius - 1.0) < 1e-12);
    CHECK(s.partner >= 0);
    CHECK(F.sides[s.partner].partner >= 0);
    CHECK(s.top <= F.max_height);
  }

  const HoroballTriple H = horoball_triple(G, F);
  CHECK(H.h_B == 2.0);
  CHECK(H.h_b == 4.0);
  CHECK(H.h_beta == 8.0);
  CHECK(H.h_B < H.h_b);
  CHECK(H.h_b < H.h_beta);
}

TEST_CASE("Ford domains of higher genus and mirrored groups") {
  for (int g : {1, 2}) {
    const FuchsianGroup G = ideal_polygon_group(g, 6.0);
    const FundamentalData F = fundamental_data(G);
    CHECK(F.sides.size() >= 2);
    CHECK(std::isfinite(F.max_height));
    const FundamentalData Fm = fundamental_data(mirror(G));
    CHECK(std::abs(Fm.max_height - F.max_height) < 1e-9);
  }
}

TEST_CASE("a closed Ford domain does not change with deeper words") {
  const FuchsianGroup G = ideal_polygon_group(2, 6.0);
  const FundamentalData F = fundamental_data(G, 6), D = fundamental_data(G, 8);
  REQUIRE(D.sides.size() == F.sides.size());
  CHECK(std::abs(D.unbounded_x0 - F.unbounded_x0) < 1e-9);
  for (size_t i = 0; i < F.sides.size(); ++i) {
    CHECK(std::abs(D.sides[i].center - F.sides[i].center) < 1e-9);
    CHECK(std::abs(D.sides[i].radius - F.sides[i].radius) < 1e-9);
    CHECK(D.sides[i].word.size() <= F.sides[i].word.size());
  }
  CHECK_THROWS_AS(fundamental_data(ideal_polygon_group(3, 6.0), 6), ConstructionError);
}

TEST_CASE("interior points of the Ford domain are not equivalent") {
  const FuchsianGroup G = punctured_torus(6.0);
  const FundamentalData F = fundamental_data(G);
  Rng rng(32);
  std::vector<cplx> pts;
  while (pts.size() < 200) {
    const cplx z(F.unbounded_x0 + rng.uniform(0, 6), rng.uniform(0.01, 4));
    if (F.margin(z) > 1e-3) pts.push_back(z);
  }
  std::vector<Mat2> stack{Mat2::Identity()};
  int violations = 0;
  for_each_reduced_word(2, 6, [&](const Word& w) {
    stack.resize(w.size());
    stack.push_back(G.letter(w.front()) * stack.back());
    const Mat2& M = stack.back();
    if (distance_from_pm_identity(M * inverse_sl2(G.translation())) < 1e-9 ||
        distance_from_pm_identity(M * G.translation()) < 1e-9)
      return true;
    for (const cplx& z : pts) {
      const cplx img = mobius(M, z);
      if (F.margin(img) > 1e-9) ++violations;
    }
    return true;
  });
  CHECK(violations == 0);

  for (const BoundedSide& s : F.sides) {
    const cplx top(s.center, s.radius);
    CHECK(std::abs(F.floor_height(s.center) - s.radius) < 1e-12);
    CHECK(F.margin(top * cplx(1.0, 0.0) + cplx(0, 0.5)) > 0.0);
  }
}
