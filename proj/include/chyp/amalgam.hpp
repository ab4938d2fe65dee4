#pragma once

// The amalgamated representation of a closed surface group: two cusped
// Fuchsian groups embedded along parallel totally real planes Sigma_{v1},
// Sigma_{v2}, glued along the common parabolic d = H_r.  Also the separating
// level set, the blended section S, and the fundamental sets Phi_1, Phi_2.

#include "chyp/fuchsian.hpp"
#include "chyp/heisenberg.hpp"
#include "chyp/rng.hpp"
#include "chyp/totally_real.hpp"
#include "chyp/words.hpp"

#include <array>
#include <optional>

namespace chyp {

/// Largest |w - v| over the projection fibres onto Sigma_v above a base point
/// at height u, divided by u.  Attained on the ideal boundary.
inline const double kFiberWExtent = 3.0 * std::sqrt(3.0) / 4.0;

struct SurfacePresentation {
  int g1 = 1, g2 = 1;

  int genus() const { return g1 + g2; }
  int num_generators() const { return 2 * genus(); }
  Word relator() const { return commutator_product(0, genus()); }
  /// The separating curve: boundary relator of the first factor, maps to d.
  Word gamma() const { return commutator_product(0, g1); }
  /// Boundary relator of factor m (0 or 1) in global letters.
  Word factor_relator(int m) const { return m == 0 ? commutator_product(0, g1) : commutator_product(g1, g2); }
  /// factor_relator(m) maps to d^{relator_sign(m)}.
  int relator_sign(int m) const { return m == 0 ? 1 : -1; }

  int factor_of(Letter l) const { return letter_index(l) < 2 * g1 ? 0 : 1; }
  int offset(int m) const { return m == 0 ? 0 : 2 * g1; }
  int factor_generators(int m) const { return 2 * (m == 0 ? g1 : g2); }

  /// Parses a word; the token "gamma" expands to the separating curve.
  Word parse(const std::string& text) const {
    std::istringstream in(text);
    std::string tok;
    Word w;
    while (in >> tok) {
      if (tok == "gamma") {
        const Word g = gamma();
        w.insert(w.end(), g.begin(), g.end());
      } else {
        const Word part = parse_word(tok, num_generators());
        w.insert(w.end(), part.begin(), part.end());
      }
    }
    return w;
  }

  /// d^p spelled in the letters of factor m.
  Word spell_d_power(int m, int p) const { return power(factor_relator(m), relator_sign(m) * p); }
};

// ---------------------------------------------------------------------------
// Alternating normal form in pi_1(M) = pi_1(M_1) *_<d> pi_1(M_2).

struct Syllable {
  int factor = 0;
  Word letters;
  std::optional<int> d_power;  // set iff the syllable lies in <d>
};

struct NormalForm {
  std::vector<Syllable> syllables;

  Word word() const {
    Word w;
    for (const Syllable& s : syllables) w.insert(w.end(), s.letters.begin(), s.letters.end());
    return w;
  }
  bool is_trivial() const { return syllables.empty(); }
  /// Power of d if the element lies in <d>.
  std::optional<int> d_power() const {
    if (syllables.empty()) return 0;
    if (syllables.size() == 1) return syllables[0].d_power;
    return std::nullopt;
  }
};

/// k if `letters` (a reduced word in one factor) equals R^k for that factor's
/// boundary relator R.
inline std::optional<int> relator_power(const SurfacePresentation& P, int m, const Word& letters) {
  const Word R = P.factor_relator(m);
  const size_t n = R.size();
  if (letters.empty()) return 0;
  if (letters.size() % n != 0) return std::nullopt;
  const int k = static_cast<int>(letters.size() / n);
  for (int sign : {1, -1}) {
    const Word base = sign > 0 ? R : inverse(R);
    bool match = true;
    for (size_t i = 0; i < letters.size() && match; ++i) match = letters[i] == base[i % n];
    if (match) return sign * k;
  }
  return std::nullopt;
}

inline std::vector<Syllable> split_syllables(const SurfacePresentation& P, const Word& w) {
  std::vector<Syllable> out;
  for (Letter l : w) {
    const int m = P.factor_of(l);
    if (out.empty() || out.back().factor != m) out.push_back({m, {}, std::nullopt});
    out.back().letters.push_back(l);
  }
  for (Syllable& s : out) {
    if (auto k = relator_power(P, s.factor, s.letters)) s.d_power = P.relator_sign(s.factor) * *k;
  }
  return out;
}

/// Free reduction, then repeatedly rewrite a <d>-syllable in the letters of
/// a neighbouring factor and reduce again, until either a single syllable
/// remains or no syllable lies in <d>.
inline NormalForm normal_form(const SurfacePresentation& P, const Word& input) {
  Word w = free_reduce(input);
  for (;;) {
    std::vector<Syllable> syl = split_syllables(P, w);
    if (syl.size() <= 1) return {syl};
    size_t i = 0;
    while (i < syl.size() && !syl[i].d_power) ++i;
    if (i == syl.size()) return {syl};
    const size_t j = i > 0 ? i - 1 : i + 1;
    syl[i].letters = P.spell_d_power(syl[j].factor, *syl[i].d_power);
    Word next;
    for (const Syllable& s : syl) next.insert(next.end(), s.letters.begin(), s.letters.end());
    w = free_reduce(next);
  }
}

/// Depth-first enumeration of normal-form words of length 1..max_len.
/// Letters are prepended (word = l * parent) so callers can update images
/// incrementally; visit(word) is called for normal-form words only.
template <class Visit>
void for_each_normal_form(const SurfacePresentation& P, int max_len, Visit&& visit) {
  Word word;
  // syllable lengths from the left end, kept in step with `word`
  std::vector<int> front_len;
  std::vector<int> syllables;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(word.size()) >= max_len) return;
    for (int g = 0; g < P.num_generators(); ++g) {
      for (Letter l : {gen_letter(g), -gen_letter(g)}) {
        if (!word.empty() && word.front() == -l) continue;
        int len = 1, count = 1;
        if (!word.empty()) {
          const int m = P.factor_of(l), mf = P.factor_of(word.front());
          if (m == mf) {
            len = front_len.back() + 1;
            count = syllables.back();
          } else {
            const Word front(word.begin(), word.begin() + front_len.back());
            if (relator_power(P, mf, front)) continue;  // would become an interior <d>-syllable
            count = syllables.back() + 1;
          }
        }
        word.insert(word.begin(), l);
        front_len.push_back(len);
        syllables.push_back(count);
        bool normal = count == 1;
        if (!normal) normal = !relator_power(P, P.factor_of(l), Word(word.begin(), word.begin() + len));
        if (normal) visit(static_cast<const Word&>(word));
        self(self);
        syllables.pop_back();
        front_len.pop_back();
        word.erase(word.begin());
      }
    }
  };
  rec(rec);
}

/// Reduced words of length 1..max_len in the letters of factor m, excluding
/// those lying in <d>.
template <class Visit>
void for_each_factor_word(const SurfacePresentation& P, int m, int max_len, Visit&& visit) {
  const int off = P.offset(m);
  for_each_reduced_word(P.factor_generators(m), max_len, [&](const Word& local) {
    Word w = local;
    for (Letter& l : w) l = (l > 0 ? 1 : -1) * gen_letter(letter_index(l) + off);
    if (!relator_power(P, m, w)) visit(static_cast<const Word&>(w), local.size());
    return true;
  });
}

// ---------------------------------------------------------------------------

struct Factor {
  FuchsianGroup group;
  FundamentalData domain;
  HoroballTriple horoballs;
  TotallyRealPlane plane;
  std::vector<Isometry> images;      // embedded generators
  std::vector<Isometry> inverses;
};

/// The hypersurface S transverse to the H_r-orbits, described on the
/// quotient chart (y, w, u): S meets the orbit of section_P(q) at
/// x = x_of(q).  Away from the blend band it is the preimage, under the
/// extended projection onto Sigma_{v_m}, of the unbounded side Re = x0_m.
struct Section {
  std::array<double, 2> x0{};
  std::array<double, 2> v{};
  double w_lo = 0.0, w_hi = 0.0;
  double blend_fraction = 0.5;

  static double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
  }

  double blend(double w) const { return smoothstep((w - w_lo) / (w_hi - w_lo)); }

  double factor_x(int m, const QuotientCoord& q) const {
    const HoroCoord base = section_P(q);
    const TotallyRealPlane plane{v[m]};
    const ProjPoint p = lift(base);
    const ProjPoint img = q.u > 0.0 ? project(plane, p) : project_boundary(plane, p);
    return x0[m] - to_horo(img).x();
  }

  double x_of(const QuotientCoord& q) const {
    const double s = blend(q.w);
    if (s == 0.0) return factor_x(0, q);
    if (s == 1.0) return factor_x(1, q);
    return (1.0 - s) * factor_x(0, q) + s * factor_x(1, q);
  }

  HoroCoord point(const QuotientCoord& q, double extra_x = 0.0) const {
    return heis_act({cplx(x_of(q) + extra_x, 0.0), 0.0}, section_P(q));
  }
};

enum class Region { X1, X2 };

inline const char* to_string(Region r) { return r == Region::X1 ? "X1" : "X2"; }

struct RegionResult {
  Region region = Region::X1;
  double margin = 0.0;  // |w - w_mid|
  bool tie = false;
};

struct BuildOptions {
  int g1 = 1, g2 = 1;
  double r = 6.0;
  std::optional<double> t;  // nullopt: automatic
  double margin = 0.5;
  double blend_fraction = 0.5;
  int ford_depth = kDefaultFordDepth;
  std::uint64_t seed = 1;
  int margin_samples = 10000;
};

struct SeparationError : ConstructionError {
  using ConstructionError::ConstructionError;
};

class AmalgamRep {
 public:
  SurfacePresentation presentation;
  std::array<Factor, 2> factors;
  double r = 0.0;
  double v1 = 0.0, v2 = 0.0;
  double w_mid = 0.0;
  double separation = 0.0;  // separation margin at the chosen t
  Isometry d;
  Section section;

  double t() const { return v2 - v1; }

  const Isometry& letter(Letter l) const {
    const int m = presentation.factor_of(l);
    const int k = letter_index(l) - presentation.offset(m);
    return l > 0 ? factors[m].images[k] : factors[m].inverses[k];
  }

  /// SL(2,R) matrix of a global letter of factor m.
  Mat2 factor_letter(int m, Letter l) const {
    const int k = letter_index(l) - presentation.offset(m);
    return factors[m].group.letter(l > 0 ? gen_letter(k) : -gen_letter(k));
  }

  /// Embeds a product of factor-m letters.  The conjugation by V_v makes
  /// entries grow like v times the generators', so products are formed in
  /// SL(2,R) and embedded once.
  Isometry factor_image(int m, Mat2 s) const {
    const double det = s.determinant();
    if (!(det > 0.0)) throw DomainError("factor_image: product lost unimodularity");
    s /= std::sqrt(det);
    return embed_so21(s, factors[m].plane);
  }

  Isometry rho(const Word& w) const {
    Isometry g;
    for (size_t i = 0; i < w.size();) {
      const int m = presentation.factor_of(w[i]);
      size_t j = i + 1;
      while (j < w.size() && presentation.factor_of(w[j]) == m) ++j;
      if (j - i == 1) {
        g = g * letter(w[i]);
      } else {
        Mat2 s = Mat2::Identity();
        for (size_t k = i; k < j; ++k) s = s * factor_letter(m, w[k]);
        g = g * factor_image(m, s);
      }
      i = j;
    }
    return g;
  }

  Isometry rho(const std::string& text) const { return rho(presentation.parse(text)); }

  RegionResult region(const HoroCoord& p, double tie_tol = 1e-9) const {
    const double w = quotient_map(p).w;
    const double gap = w - w_mid;
    return {gap > 0.0 ? Region::X1 : Region::X2, std::abs(gap), std::abs(gap) < tie_tol * std::max(1.0, std::abs(w_mid))};
  }
  RegionResult region(const ProjPoint& p, double tie_tol = 1e-9) const { return region(to_horo(p), tie_tol); }

  /// X_m for factor index m = 0, 1: the side away from Sigma_{v_{m+1}},
  /// which Gamma_{m+1} - <d> maps into the other side.
  static Region region_of(int m) { return m == 0 ? Region::X1 : Region::X2; }
};

/// Samples of the preimage, under the extended projection onto Sigma_0, of
/// {x0 <= Re <= x0 + r, Im <= h}: points (and ideal points) on the fibres.
/// Returned as w-offsets from the plane; only the fibres' w spread matters.
inline std::vector<double> sample_fiber_w(const FundamentalData& F, double h, int n, std::uint64_t seed,
                                          std::uint64_t stream) {
  Rng rng(seed, stream);
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const cplx z(F.unbounded_x0 + rng.uniform(0.0, F.width), h * std::sqrt(rng.uniform(1e-6, 1.0)));
    const double th = rng.uniform(0.0, 2.0 * kPi);
    const bool ideal = rng.uniform() < 0.5;
    const ProjPoint p = ideal ? fiber_boundary_point({}, z, th) : fiber_point({}, z, rng.uniform(0.0, 6.0), th);
    out.push_back(quotient_map(to_horo(p)).w);
  }
  return out;
}

/// Signed separation of the two sets pi_{v_m}^{-1}(Sigma_{v_m} - beta_m) by the
/// level set w = (v1 + v2) / 2, for v1 = 0, v2 = t.
inline double separation_margin(const std::array<Factor, 2>& factors, double t, int n, std::uint64_t seed) {
  const double w_mid = 0.5 * t;
  double m = INFINITY;
  for (int k = 0; k < 2; ++k) {
    const auto& f = factors[k];
    const std::vector<double> ws = sample_fiber_w(f.domain, f.horoballs.h_beta, n, seed, 100 + k);
    for (double w : ws) m = std::min(m, k == 0 ? w_mid - w : (t + w) - w_mid);
  }
  return m;
}

inline Factor make_factor(const FuchsianGroup& G, double v, int ford_depth) {
  Factor f;
  f.group = G;
  f.domain = fundamental_data(G, ford_depth);
  f.horoballs = horoball_triple(G, f.domain);
  f.plane = {v};
  for (const Mat2& g : G.generators) {
    f.images.push_back(embed_so21(g, f.plane));
    f.inverses.push_back(embed_so21(inverse_sl2(g), f.plane));
  }
  return f;
}

inline FuchsianGroup default_factor_group(int genus, double r) {
  return genus == 1 ? punctured_torus(r) : ideal_polygon_group(genus, r);
}

inline AmalgamRep build(const BuildOptions& opt) {
  if (opt.g1 < 1 || opt.g2 < 1) throw std::invalid_argument("build: genera must be >= 1");
  if (!(opt.r > 0.0)) throw std::invalid_argument("build: r must be positive");
  if (!(opt.blend_fraction > 0.0 && opt.blend_fraction < 1.0))
    throw std::invalid_argument("build: blend_fraction must lie in (0, 1)");

  // factor 2 is mirrored so that its boundary relator maps to d^-1 and the
  // surface relator [a1,b1]...[ag,bg] maps to the identity
  const FuchsianGroup G1 = default_factor_group(opt.g1, opt.r);
  const FuchsianGroup G2 = mirror(default_factor_group(opt.g2, opt.r));
  std::array<Factor, 2> fac = {make_factor(G1, 0.0, opt.ford_depth), make_factor(G2, 0.0, opt.ford_depth)};

  double t;
  double sep;
  if (opt.t) {
    t = *opt.t;
    sep = separation_margin(fac, t, opt.margin_samples, opt.seed);
  } else {
    t = 1.0;
    for (;;) {
      sep = separation_margin(fac, t, opt.margin_samples, opt.seed);
      if (sep >= opt.margin) break;
      t *= 2.0;
      if (t > 65536.0) throw SeparationError("build: no t <= 2^16 separates the factors by the requested margin");
    }
  }

  AmalgamRep rep;
  rep.presentation = {opt.g1, opt.g2};
  rep.r = opt.r;
  rep.v1 = 0.0;
  rep.v2 = t;
  rep.w_mid = 0.5 * t;
  rep.separation = sep;
  rep.factors = {make_factor(G1, rep.v1, opt.ford_depth), make_factor(G2, rep.v2, opt.ford_depth)};
  rep.d = h_translation(opt.r);

  Section& S = rep.section;
  S.x0 = {rep.factors[0].domain.unbounded_x0, rep.factors[1].domain.unbounded_x0};
  S.v = {rep.v1, rep.v2};
  S.blend_fraction = opt.blend_fraction;
  const double h = kFiberWExtent * std::max(rep.factors[0].horoballs.u_b(), rep.factors[1].horoballs.u_b());
  const double lo = rep.v1 + h, hi = rep.v2 - h;
  const double mid = 0.5 * (lo + hi), half = 0.5 * opt.blend_fraction * (hi - lo);
  S.w_lo = mid - half;
  S.w_hi = mid + half;

  const Isometry rel = rep.rho(rep.presentation.relator());
  const Isometry gam = rep.rho(rep.presentation.gamma());
  // rounding grows with the size of the generators' entries (about 13 for genus 2)
  const double rel_res = distance_from_scalar(rel.matrix()), gam_res = distance_mod_scalar(gam, rep.d);
  if (rel_res > 1e-9 * std::max(1.0, max_abs(rel.matrix())) || gam_res > 1e-9 * std::max(1.0, max_abs(gam.matrix())))
    throw ConstructionError("build: relator check failed (relator residual " + std::to_string(rel_res) +
                            ", gamma residual " + std::to_string(gam_res) + ")");
  return rep;
}

// ---------------------------------------------------------------------------
// Fundamental sets.

/// 0, 1: Phi_1, Phi_2; 2: Phi = Phi_1 cap Phi_2.
struct FundamentalRegion {
  int which = 2;
};

inline FundamentalRegion fundamental_region(int m) { return {m}; }
inline FundamentalRegion phi() { return {2}; }

/// Position of p relative to the slab between S and d(S): x(p) - X_S, in [0, r) inside.
inline double slab_coordinate(const AmalgamRep& rep, const HoroCoord& p) {
  return p.x() - rep.section.x_of(quotient_map(p));
}

/// Relative distance of the projection onto Sigma_{v_m} from the union of
/// bounded sides (all translates); positive above them.
inline double bounded_margin(const AmalgamRep& rep, int m, const ProjPoint& p) {
  const Factor& f = rep.factors[m];
  const ProjPoint img = p.is_interior(1e-14) ? project(f.plane, p) : project_boundary(f.plane, p);
  if (img.is_infinity()) return INFINITY;
  const cplx z = plane_to_uhp(to_horo(img));
  const FundamentalData& F = f.domain;
  double t = z.real() - F.unbounded_x0;
  t -= F.width * std::floor(t / F.width);
  const cplx zs(t + F.unbounded_x0, z.imag());
  double best = INFINITY;
  for (const BoundedSide& s : F.sides)
    for (int k = -1; k <= 1; ++k) best = std::min(best, std::abs(zs - cplx(s.center + k * F.width, 0.0)) / s.radius - 1.0);
  return best;
}

struct Membership {
  double slab = 0.0;     // x - X_S
  double margin = 0.0;   // > 0 inside
  bool inside(double tol = 0.0) const { return margin > tol; }
};

inline Membership membership(const AmalgamRep& rep, const FundamentalRegion& R, const ProjPoint& p) {
  const HoroCoord h = to_horo(p);
  const double sx = slab_coordinate(rep, h);
  double m = std::min(sx, rep.r - sx) / rep.r;
  if (R.which == 0 || R.which == 2) m = std::min(m, bounded_margin(rep, 0, p));
  if (R.which == 1 || R.which == 2) m = std::min(m, bounded_margin(rep, 1, p));
  return {sx, m};
}

/// n such that d^n p lies in the slab [X_S, X_S + r).
inline int slab_shift(const AmalgamRep& rep, const HoroCoord& p) {
  return -static_cast<int>(std::floor(slab_coordinate(rep, p) / rep.r));
}

}  // namespace chyp
