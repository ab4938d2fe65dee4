#pragma once

// Cusped surface groups in SL(2,R): one cusp at infinity whose stabilizer is
// generated by the boundary relator prod [a_i, b_i], acting as a horizontal
// translation.  Also the Ford domain and the horoball heights used by the
// amalgam construction.

#include "chyp/totally_real.hpp"
#include "chyp/words.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace chyp {

struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FuchsianGroup {
  int genus = 1;
  std::vector<Mat2> generators;  // a1, b1, ..., ag, bg
  double cusp_length = 0.0;
  // +1 if the boundary relator acts as z -> z + r, -1 if as z -> z - r.
  int orientation = 1;

  int num_generators() const { return 2 * genus; }
  Word boundary_relator() const { return commutator_product(0, genus); }

  Mat2 letter(Letter l) const {
    const Mat2& g = generators[letter_index(l)];
    if (l > 0) return g;
    Mat2 inv;
    inv << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
    return inv;
  }

  Mat2 evaluate(const Word& w) const {
    Mat2 m = Mat2::Identity();
    for (Letter l : w) m = m * letter(l);
    return m;
  }

  Mat2 relator_matrix() const { return evaluate(boundary_relator()); }

  /// The cusp generator z -> z + r, as +-relator^{+-1}.
  Mat2 translation() const {
    Mat2 t;
    t << 1.0, cusp_length, 0.0, 1.0;
    return t;
  }
};

inline Mat2 mat2(double a, double b, double c, double d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

inline Mat2 inverse_sl2(const Mat2& g) { return mat2(g(1, 1), -g(0, 1), -g(1, 0), g(0, 0)); }

inline cplx mobius(const Mat2& g, cplx z) { return (g(0, 0) * z + g(0, 1)) / (g(1, 0) * z + g(1, 1)); }

/// Distance of g from {I, -I} in the max norm.
inline double distance_from_pm_identity(const Mat2& g) {
  const Mat2 I = Mat2::Identity();
  return std::min((g - I).cwiseAbs().maxCoeff(), (g + I).cwiseAbs().maxCoeff());
}

namespace detail {

inline void conjugate_all(std::vector<Mat2>& gens, const Mat2& c) {
  const Mat2 ci = c.inverse();
  for (Mat2& g : gens) g = c * g * ci;
}

// Conjugates (by GL(2,R)) so the parabolic relator fixes infinity and acts as
// z -> z + r.  Conjugating by a det -1 matrix is an automorphism of SL(2,R).
inline void normalize_cusp(FuchsianGroup& G, double r) {
  Mat2 P = G.relator_matrix();
  if (std::abs(std::abs(P.trace()) - 2.0) > 1e-9)
    throw ConstructionError("boundary relator is not parabolic, trace " + std::to_string(P.trace()));
  const double scale = P.cwiseAbs().maxCoeff();
  if (std::abs(P(1, 0)) > 1e-12 * scale) {
    const double fixed = (P(0, 0) - P(1, 1)) / (2.0 * P(1, 0));
    detail::conjugate_all(G.generators, mat2(0.0, -1.0, 1.0, -fixed));
    P = G.relator_matrix();
  }
  const double T = P(0, 1) / P(0, 0);
  if (T < 0.0) {
    detail::conjugate_all(G.generators, mat2(1.0, 0.0, 0.0, -1.0));
  }
  const double k2 = r / std::abs(T);
  if (k2 != 1.0) {
    const double k = std::sqrt(k2);
    detail::conjugate_all(G.generators, mat2(k, 0.0, 0.0, 1.0 / k));
  }
  G.cusp_length = r;
  G.orientation = 1;
}

}  // namespace detail

inline FuchsianGroup punctured_torus(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("punctured_torus: r must be positive");
  FuchsianGroup G;
  G.genus = 1;
  G.generators = {mat2(1, 1, 1, 2), mat2(1, -1, -1, 2)};
  detail::normalize_cusp(G, r);
  return G;
}

namespace detail {

// Orientation-preserving map sending a -> 0 and b -> infinity; nullopt = infinity.
inline Mat2 standardize(std::optional<double> a, std::optional<double> b) {
  if (!a) return mat2(0.0, -1.0, 1.0, -*b);
  if (!b) return mat2(1.0, -*a, 0.0, 1.0);
  Mat2 m = mat2(1.0, -*a, 1.0, -*b);
  double det = *a - *b;
  if (det < 0.0) {
    m.row(0) *= -1.0;
    det = -det;
  }
  return m / std::sqrt(det);
}

inline cplx side_midpoint(std::optional<double> p, std::optional<double> q) {
  if (!p) return {*q, 1.0};
  if (!q) return {*p, 1.0};
  return {0.5 * (*p + *q), 0.5 * std::abs(*q - *p)};
}

}  // namespace detail

/// Side pairings of the ideal 4g-gon with vertices inf, 0, 1, ..., 4g-2
/// glued in the pattern a1 b1 a1^-1 b1^-1 ... with zero shear, normalized so
/// the boundary relator is z -> z + r.
inline FuchsianGroup ideal_polygon_group(int g, double r) {
  if (g < 1) throw std::invalid_argument("ideal_polygon_group: genus must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("ideal_polygon_group: r must be positive");
  const int n = 4 * g;
  std::vector<std::optional<double>> V(n);
  for (int i = 1; i < n; ++i) V[i] = static_cast<double>(i - 1);
  auto vert = [&](int i) { return V[((i % n) + n) % n]; };

  // Pairing of side i = (V_i, V_{i+1}) onto side j, sending V_i -> V_{j+1}.
  auto pairing = [&](int i, int j) {
    const Mat2 Si = detail::standardize(vert(i), vert(i + 1));
    const Mat2 Sj = detail::standardize(vert(j + 1), vert(j));
    const double y1 = mobius(Si, detail::side_midpoint(vert(i), vert(i + 1))).imag();
    const double y2 = mobius(Sj, detail::side_midpoint(vert(j), vert(j + 1))).imag();
    const double k = std::sqrt(y2 / y1);
    return Mat2(inverse_sl2(Sj) * mat2(k, 0.0, 0.0, 1.0 / k) * Si);
  };

  FuchsianGroup G;
  G.genus = g;
  std::vector<std::pair<int, int>> pairs;
  for (int h = 0; h < g; ++h) {
    pairs.push_back({4 * h + 2, 4 * h});
    pairs.push_back({4 * h + 1, 4 * h + 3});
  }
  for (auto [i, j] : pairs) G.generators.push_back(pairing(i, j));

  // vertex cycle: union the endpoints identified by each pairing
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::ostringstream diag;
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    const Mat2& M = G.generators[k];
    const std::pair<int, int> ends[2] = {{i, j + 1}, {i + 1, j}};
    for (auto [from, to] : ends) {
      const auto src = vert(from), dst = vert(to);
      const cplx den = M(1, 0) * (src ? *src : 0.0) + M(1, 1);
      bool ok;
      if (!src) {
        ok = dst ? std::abs(M(0, 0) / M(1, 0) - *dst) < 1e-9 : std::abs(M(1, 0)) < 1e-12;
      } else if (!dst) {
        ok = std::abs(den) < 1e-12;
      } else {
        ok = std::abs(mobius(M, *src) - *dst) < 1e-9;
      }
      if (!ok) diag << " generator " << generator_name(static_cast<int>(k)) << " misses vertex " << to;
      parent[find(from % n)] = find(to % n);
    }
  }
  int cycles = 0;
  for (int i = 0; i < n; ++i) cycles += find(i) == i;
  if (cycles != 1) diag << " vertex cycles: " << cycles;
  const double tr = G.relator_matrix().trace();
  if (std::abs(std::abs(tr) - 2.0) > 1e-9) diag << " cycle product trace " << tr;
  if (!diag.str().empty()) throw ConstructionError("ideal_polygon_group(" + std::to_string(g) + "):" + diag.str());

  detail::normalize_cusp(G, r);
  return G;
}

/// Conjugate by z -> -conj(z).  The boundary relator then acts as z -> z - r.
inline FuchsianGroup mirror(const FuchsianGroup& G) {
  FuchsianGroup M = G;
  for (Mat2& g : M.generators) g = mat2(g(0, 0), -g(0, 1), -g(1, 0), g(1, 1));
  M.orientation = -G.orientation;
  return M;
}

struct BoundedSide {
  double center = 0.0;
  double radius = 0.0;
  double x_lo = 0.0, x_hi = 0.0;
  double top = 0.0;  // max height of the arc
  Word word;         // pairing is evaluate(word) * T^shift
  int shift = 0;
  Mat2 pairing;      // maps this side onto side `partner`, both in the strip
  int partner = -1;
};

struct FundamentalData {
  double unbounded_x0 = 0.0;
  double width = 0.0;
  std::vector<BoundedSide> sides;  // ordered by x
  double max_height = 0.0;
  int word_depth = 0;

  /// Height of the floor of the domain over x (periodic in x).
  double floor_height(double x) const {
    double t = x - unbounded_x0;
    t -= width * std::floor(t / width);
    t += unbounded_x0;
    for (const BoundedSide& s : sides)
      if (t >= s.x_lo - 1e-12 && t <= s.x_hi + 1e-12)
        return std::sqrt(std::max(0.0, s.radius * s.radius - (t - s.center) * (t - s.center)));
    return 0.0;
  }

  bool in_strip(cplx z) const { return z.real() >= unbounded_x0 && z.real() <= unbounded_x0 + width; }

  /// Signed margin of z inside the closed domain (negative outside), in the
  /// metric-free sense of min(|z - c| - rho over sides, distance to the strip walls).
  double margin(cplx z) const {
    double m = std::min(z.real() - unbounded_x0, unbounded_x0 + width - z.real());
    for (const BoundedSide& s : sides) {
      for (int k = -1; k <= 1; ++k)
        m = std::min(m, std::abs(z - cplx(s.center + k * width, 0.0)) - s.radius);
    }
    return m;
  }
};

inline constexpr int kDefaultFordDepth = 6;

namespace detail {

struct Circle {
  double center, radius;
  Word word;
  int shift;
};

// Upper envelope of the lines y = 2c x + rho^2 - c^2; the floor of the
// domain is sqrt(envelope(x) - x^2).
struct Hull {
  std::vector<int> lines;    // indices into circles, increasing slope
  std::vector<double> brk;   // brk[k] = x where lines[k] hands over to lines[k+1]
};

inline Hull upper_envelope(const std::vector<Circle>& cs) {
  std::vector<int> idx(cs.size());
  for (size_t i = 0; i < cs.size(); ++i) idx[i] = static_cast<int>(i);
  auto slope = [&](int i) { return 2.0 * cs[i].center; };
  auto icpt = [&](int i) { return cs[i].radius * cs[i].radius - cs[i].center * cs[i].center; };
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (slope(a) != slope(b)) return slope(a) < slope(b);
    return icpt(a) > icpt(b);
  });
  auto cross = [&](int a, int b) { return (icpt(a) - icpt(b)) / (slope(b) - slope(a)); };
  Hull h;
  for (int i : idx) {
    if (!h.lines.empty() && std::abs(slope(h.lines.back()) - slope(i)) < 1e-14) continue;
    while (h.lines.size() >= 2 &&
           cross(h.lines[h.lines.size() - 2], i) <= cross(h.lines[h.lines.size() - 2], h.lines.back()))
      h.lines.pop_back();
    h.lines.push_back(i);
  }
  for (size_t k = 0; k + 1 < h.lines.size(); ++k) h.brk.push_back(cross(h.lines[k], h.lines[k + 1]));
  return h;
}

}  // namespace detail

/// Ford domain: the strip x0 <= Re z <= x0 + r above the isometric circles of
/// words of length <= depth (translated by powers of the cusp generator).
inline FundamentalData fundamental_data(const FuchsianGroup& G, int depth = kDefaultFordDepth) {
  const double r = G.cusp_length;
  auto Tpow = [&](int k) { return mat2(1.0, k * r, 0.0, 1.0); };

  std::map<std::pair<long long, long long>, detail::Circle> unique;
  auto key = [](double c, double rho) {
    return std::make_pair(std::llround(c * 1e8), std::llround(rho * 1e8));
  };
  // translates of the circles; reach 1 covers one period, reach 2 a period
  // widened by the largest radius on both sides
  auto periodic = [&](const std::map<std::pair<long long, long long>, detail::Circle>& circles, int spread,
                      bool words) {
    double rho_max = 0.0;
    for (auto& [k, c] : circles) rho_max = std::max(rho_max, c.radius);
    const int reach = static_cast<int>(std::ceil(spread * rho_max / r)) + 1;
    std::vector<detail::Circle> cs;
    for (auto& [k, c] : circles)
      for (int n = -reach; n <= reach + 1; ++n)
        cs.push_back({c.center + n * r, c.radius, words ? c.word : Word{}, c.shift - n});
    return cs;
  };

  // The envelope only rises as circles are added, so a circle lying under the
  // current one never reaches the final floor.  Dropping those keeps the
  // search in memory when the word count is large.
  std::vector<double> slope, icpt, brk;
  double filter_rho = 0.0;
  size_t next_filter = 1 << 15;
  auto envelope_at = [&](double x) {
    const size_t k = std::upper_bound(brk.begin(), brk.end(), x) - brk.begin();
    return slope[k] * x + icpt[k];
  };
  auto buried = [&](double c, double rho) {
    if (slope.empty() || rho > filter_rho) return false;
    auto below = [&](double x) {
      const double e = envelope_at(x);
      return 2.0 * c * x + rho * rho - c * c < e - 1e-12 * (1.0 + std::abs(e));
    };
    if (!below(c - rho) || !below(c + rho)) return false;
    // the gap to the concave envelope is largest where the slopes cross
    const size_t k = std::upper_bound(slope.begin(), slope.end(), 2.0 * c) - slope.begin();
    if (k > 0 && k <= brk.size()) {
      const double x = brk[k - 1];
      if (x > c - rho && x < c + rho && !below(x)) return false;
    }
    return true;
  };
  auto refilter = [&] {
    const std::vector<detail::Circle> cs = periodic(unique, 2, false);
    const detail::Hull hull = detail::upper_envelope(cs);
    slope.clear();
    icpt.clear();
    for (int i : hull.lines) {
      slope.push_back(2.0 * cs[i].center);
      icpt.push_back(cs[i].radius * cs[i].radius - cs[i].center * cs[i].center);
    }
    brk = hull.brk;
    filter_rho = 0.0;
    for (auto& [k, c] : unique) filter_rho = std::max(filter_rho, c.radius);
    for (auto it = unique.begin(); it != unique.end();)
      it = buried(it->second.center, it->second.radius) ? unique.erase(it) : std::next(it);
    next_filter = std::max(next_filter, 2 * unique.size());
  };

  // incremental matrices along the prepend-order DFS
  std::vector<Mat2> stack{Mat2::Identity()};
  for_each_reduced_word(G.num_generators(), depth, [&](const Word& w) {
    stack.resize(w.size());
    const Mat2 M = G.letter(w.front()) * stack.back();
    stack.push_back(M);
    if (std::abs(M(1, 0)) < 1e-12 * M.cwiseAbs().maxCoeff()) return true;
    const double c0 = -M(1, 1) / M(1, 0), rho = 1.0 / std::abs(M(1, 0));
    // I(M T^k) has centre c0 - k r
    const int k = static_cast<int>(std::floor(c0 / r));
    const double c = c0 - k * r;
    if (buried(c, rho)) return true;
    auto [it, fresh] = unique.try_emplace(key(c, rho), detail::Circle{c, rho, w, k});
    if (!fresh && w.size() < it->second.word.size()) it->second = {c, rho, w, k};
    if (unique.size() >= next_filter) refilter();
    return true;
  });
  if (unique.empty()) throw ConstructionError("fundamental_data: no isometric circles");

  const std::vector<detail::Circle> cs = periodic(unique, 1, true);
  const detail::Hull hull = detail::upper_envelope(cs);
  auto height2 = [&](int line, double x) {
    const auto& c = cs[line];
    return c.radius * c.radius - (x - c.center) * (x - c.center);
  };

  // choose x0: highest envelope vertex in [0, r)
  double x0 = 0.0, best = -INFINITY;
  for (size_t k = 0; k < hull.brk.size(); ++k) {
    const double x = hull.brk[k];
    if (x < -1e-12 || x >= r - 1e-12) continue;
    const double h2 = height2(hull.lines[k], x);
    if (h2 < 1e-9)
      throw ConstructionError("fundamental_data: domain does not close at word depth " +
                              std::to_string(depth) + " (ideal vertex near x = " + std::to_string(x) +
                              "); increase L_ford");
    if (h2 > best + 1e-9) {
      best = h2;
      x0 = x;
    }
  }
  if (best == -INFINITY) throw ConstructionError("fundamental_data: envelope has no vertex in one period");

  FundamentalData F;
  F.unbounded_x0 = x0;
  F.width = r;
  F.word_depth = depth;
  const double x1 = x0 + r;
  for (size_t k = 0; k < hull.lines.size(); ++k) {
    const double lo = k == 0 ? -INFINITY : hull.brk[k - 1];
    const double hi = k == hull.brk.size() ? INFINITY : hull.brk[k];
    const double a = std::max(lo, x0), b = std::min(hi, x1);
    if (b - a <= 1e-12) continue;
    const auto& c = cs[hull.lines[k]];
    if (height2(hull.lines[k], a) < 1e-9 || height2(hull.lines[k], b) < 1e-9)
      throw ConstructionError("fundamental_data: domain does not close at word depth " +
                              std::to_string(depth) + "; increase L_ford");
    BoundedSide s;
    s.center = c.center;
    s.radius = c.radius;
    s.x_lo = a;
    s.x_hi = b;
    s.top = (c.center >= a && c.center <= b) ? c.radius
                                             : std::sqrt(std::max(height2(hull.lines[k], a), height2(hull.lines[k], b)));
    s.word = c.word;
    s.shift = c.shift;
    s.pairing = G.evaluate(c.word) * Tpow(c.shift);
    F.sides.push_back(s);
    F.max_height = std::max(F.max_height, s.top);
  }

  // pairings: M maps I(M) onto I(M^-1); translate the image back into the strip
  for (size_t i = 0; i < F.sides.size(); ++i) {
    BoundedSide& s = F.sides[i];
    auto arc = [&](const BoundedSide& q, double t) {
      const double x = q.x_lo + t * (q.x_hi - q.x_lo);
      return cplx(x, std::sqrt(std::max(0.0, q.radius * q.radius - (x - q.center) * (x - q.center))));
    };
    const cplx mid = mobius(s.pairing, arc(s, 0.5));
    const int n = static_cast<int>(std::floor((mid.real() - x0) / r));
    const Mat2 P = Tpow(-n) * s.pairing;
    const cplx img = mobius(P, arc(s, 0.5));
    for (size_t j = 0; j < F.sides.size(); ++j) {
      const BoundedSide& q = F.sides[j];
      if (img.real() >= q.x_lo - 1e-9 && img.real() <= q.x_hi + 1e-9 &&
          std::abs(std::abs(img - cplx(q.center, 0.0)) - q.radius) < 1e-8 * std::max(1.0, q.radius)) {
        s.partner = static_cast<int>(j);
        break;
      }
    }
    if (s.partner < 0)
      throw ConstructionError("fundamental_data: side " + std::to_string(i) + " has no paired side at depth " +
                              std::to_string(depth) + "; increase L_ford");
    s.pairing = P;
    const BoundedSide& q = F.sides[s.partner];
    for (int k = 0; k <= 16; ++k) {
      const cplx z = mobius(P, arc(s, k / 16.0));
      const double off = std::abs(std::abs(z - cplx(q.center, 0.0)) - q.radius);
      if (off > 1e-8 * std::max(1.0, q.radius) || z.real() < q.x_lo - 1e-8 || z.real() > q.x_hi + 1e-8)
        throw ConstructionError("fundamental_data: pairing of side " + std::to_string(i) +
                                " does not map onto side " + std::to_string(s.partner));
    }
  }
  return F;
}

/// Concentric horoballs at infinity, as UHP heights; in a totally real
/// plane they are {u > h^2}.
struct HoroballTriple {
  double h_B = 0.0, h_b = 0.0, h_beta = 0.0;

  double u_B() const { return h_B * h_B; }
  double u_b() const { return h_b * h_b; }
  double u_beta() const { return h_beta * h_beta; }
};

inline HoroballTriple horoball_triple(const FuchsianGroup&, const FundamentalData& F) {
  const double hB = 2.0 * F.max_height;
  return {hB, 2.0 * hB, 4.0 * hB};
}

}  // namespace chyp
