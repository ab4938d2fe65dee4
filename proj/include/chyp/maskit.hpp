#pragma once

// Sampled checks of the combination-theorem hypotheses for an AmalgamRep:
// precise invariance of the regions X_1, X_2, the interactive pair, the
// fundamental sets Phi_1, Phi_2, Phi, faithfulness evidence on normal-form
// words, and the census of parabolic elements.

#include "chyp/amalgam.hpp"
#include "chyp/report.hpp"

#include <cmath>

namespace chyp {

inline constexpr double kTieTol = 1e-9;
inline constexpr double kMembershipTol = 1e-9;

struct WordImage {
  Word word;
  Isometry image;
};

/// All factor-m words of length <= L not in <d>, with their images.
inline std::vector<WordImage> factor_word_images(const AmalgamRep& rep, int m, int L) {
  std::vector<WordImage> out;
  std::vector<Mat2> stack{Mat2::Identity()};
  for_each_reduced_word(rep.presentation.factor_generators(m), L, [&](const Word& local) {
    Word w = local;
    for (Letter& l : w) l = (l > 0 ? 1 : -1) * gen_letter(letter_index(l) + rep.presentation.offset(m));
    stack.resize(w.size());
    stack.push_back(rep.factor_letter(m, w.front()) * stack.back());
    if (!relator_power(rep.presentation, m, w)) out.push_back({w, rep.factor_image(m, stack.back())});
    return true;
  });
  return out;
}

/// All nonempty normal-form words of length <= L, with their images.
inline std::vector<WordImage> normal_form_images(const AmalgamRep& rep, int L, bool skip_d_powers) {
  std::vector<WordImage> out;
  for_each_normal_form(rep.presentation, L, [&](const Word& w) {
    if (skip_d_powers) {
      const auto syl = split_syllables(rep.presentation, w);
      if (syl.size() == 1 && syl[0].d_power) return;
    }
    out.push_back({w, rep.rho(w)});
  });
  return out;
}

// ---------------------------------------------------------------------------
// Sampling.

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

/// Uniform in a horospherical box (x in [0,r), |y| <= 2, w over the span of
/// both planes plus t/4 on either side, u log-uniform in [1e-3, 1e3]).
inline HoroCoord sample_ambient(const AmalgamRep& rep, Rng& rng) {
  const double t = rep.t();
  const double x = rng.uniform(0.0, rep.r), y = rng.uniform(-2.0, 2.0);
  const double w = rng.uniform(rep.v1 - 0.25 * t, rep.v2 + 0.25 * t);
  const double u = log_uniform(rng, 1e-3, 1e3);
  return HoroCoord::from_xyuv(x, y, u, w - 2.0 * x * y);
}

/// Same box restricted to one side of the level set.
inline HoroCoord sample_region(const AmalgamRep& rep, Region side, Rng& rng) {
  const double t = rep.t();
  const double x = rng.uniform(0.0, rep.r), y = rng.uniform(-2.0, 2.0);
  const double w = side == Region::X1 ? rng.uniform(rep.w_mid, rep.w_mid + t) : rng.uniform(rep.w_mid - t, rep.w_mid);
  const double u = log_uniform(rng, 1e-3, 1e3);
  return HoroCoord::from_xyuv(x, y, u, w - 2.0 * x * y);
}

/// Rejection sample of a fundamental region: the slab coordinate is drawn
/// uniformly in (0, r), the rest from the box, and points below a bounded
/// side are rejected.
inline HoroCoord sample_fundamental(const AmalgamRep& rep, const FundamentalRegion& R, Rng& rng,
                                    double min_margin = 1e-6) {
  for (;;) {
    const HoroCoord a = sample_ambient(rep, rng);
    const QuotientCoord q = quotient_map(a);
    const HoroCoord p = rep.section.point(q, rng.uniform(0.0, rep.r));
    if (membership(rep, R, lift(p)).margin > min_margin) return p;
  }
}

// ---------------------------------------------------------------------------

/// Elements of Gamma_m - <d> map X_m into the other region; powers of d
/// preserve X_m.  m is the factor index (0 or 1).
inline VerificationReport check_precisely_invariant(const AmalgamRep& rep, int m, int L, int N, std::uint64_t seed) {
  VerificationReport rep_out;
  rep_out.check_name = "precisely_invariant_X" + std::to_string(m + 1);
  rep_out.seed = seed;
  const Region own = AmalgamRep::region_of(m);
  const std::vector<WordImage> words = factor_word_images(rep, m, L);
  std::vector<std::pair<std::string, Isometry>> dpow;
  for (int k : {-2, -1, 1, 2}) dpow.push_back({"d^" + std::to_string(k), h_translation(k * rep.r)});
  Rng rng(seed, 200 + m);
  for (int i = 0; i < N; ++i) {
    const HoroCoord p = sample_region(rep, own, rng);
    const ProjPoint P = lift(p);
    ++rep_out.samples_tested;
    for (const WordImage& g : words) {
      const RegionResult res = rep.region(g.image(P), kTieTol);
      const double margin = res.region != own && !res.tie ? res.margin : -res.margin;
      if (margin <= 0.0) ++rep_out.violations;
      rep_out.record(margin, p, to_string(g.word));
    }
    for (const auto& [name, g] : dpow) {
      const RegionResult res = rep.region(g(P), kTieTol);
      const double margin = res.region == own && !res.tie ? res.margin : -res.margin;
      if (margin <= 0.0) ++rep_out.violations;
      rep_out.record(margin, p, name);
    }
  }
  rep_out.details["region"] = to_string(own);
  rep_out.details["word_length"] = L;
  rep_out.details["words"] = words.size();
  return rep_out;
}

inline VerificationReport check_interactive_pair(const AmalgamRep& rep, int L, int N, std::uint64_t seed) {
  VerificationReport out;
  out.check_name = "interactive_pair";
  out.seed = seed;
  nlohmann::ordered_json parts = nlohmann::ordered_json::array();
  for (int m = 0; m < 2; ++m) {
    const VerificationReport r = check_precisely_invariant(rep, m, L, N, seed);
    out.samples_tested += r.samples_tested;
    out.violations += r.violations;
    if (r.min_margin < out.min_margin) {
      out.min_margin = r.min_margin;
      out.witness = r.witness;
    }
    parts.push_back({{"check_name", r.check_name}, {"violations", r.violations}, {"min_margin", json_number(r.min_margin)}});
  }
  out.details["precisely_invariant"] = parts;

  // disjointness: the predicate is exclusive, so only ties could lie in both
  Rng rng(seed, 300);
  long long ties = 0;
  for (int i = 0; i < N; ++i) {
    const RegionResult res = rep.region(sample_ambient(rep, rng), kTieTol);
    ++out.samples_tested;
    if (res.tie) ++ties;
  }
  out.violations += ties;
  out.details["disjointness_samples"] = N;
  out.details["in_both"] = ties;

  // a point of Phi in X_{3-m} with no Gamma_m-equivalent in X_m
  nlohmann::ordered_json wit = nlohmann::ordered_json::array();
  for (int m = 0; m < 2; ++m) {
    const Region own = AmalgamRep::region_of(m);
    const std::vector<WordImage> words = factor_word_images(rep, m, L);
    Rng wr(seed, 400 + m);
    std::optional<HoroCoord> found;
    for (int attempt = 0; attempt < 500 && !found; ++attempt) {
      const HoroCoord p = sample_fundamental(rep, phi(), wr);
      if (rep.region(p).region == own) continue;
      const ProjPoint P = lift(p);
      bool ok = true;
      for (const WordImage& g : words)
        if (rep.region(g.image(P)).region == own) {
          ok = false;
          break;
        }
      if (ok) found = p;
    }
    if (!found) ++out.violations;
    wit.push_back(found ? nlohmann::ordered_json{{"factor", m + 1}, {"point", to_json(*found)}}
                        : nlohmann::ordered_json{{"factor", m + 1}, {"point", nullptr}});
  }
  out.details["witnesses"] = wit;
  return out;
}

// ---------------------------------------------------------------------------
// Fundamental sets.

/// group: 0 or 1 for Gamma_1, Gamma_2; -1 for the whole group.
struct Reduction {
  bool covered = false;
  int letters = 0;
};

namespace detail {

// Ford step in Sigma_{v_m}: if the projection of p lies inside a bounded
// side's circle, returns the embedded pairing (preceded by the d-power
// moving the projection into the strip) and its letter count.
inline std::optional<std::pair<Isometry, int>> ford_step(const AmalgamRep& rep, int m, const ProjPoint& p) {
  const Factor& f = rep.factors[m];
  const ProjPoint img = p.is_interior(1e-14) ? project(f.plane, p) : project_boundary(f.plane, p);
  if (img.is_infinity()) return std::nullopt;
  const cplx z = plane_to_uhp(to_horo(img));
  const FundamentalData& F = f.domain;
  const int k = -static_cast<int>(std::floor((z.real() - F.unbounded_x0) / F.width));
  const cplx zs = z + cplx(k * F.width, 0.0);
  const BoundedSide* best = nullptr;
  int best_j = 0;
  double depth = 0.0;
  for (const BoundedSide& s : F.sides) {
    for (int j = -1; j <= 1; ++j) {
      const double q = std::abs(zs - cplx(s.center + j * F.width, 0.0)) / s.radius - 1.0;
      if (q < depth) {
        depth = q;
        best = &s;
        best_j = j;
      }
    }
  }
  if (!best) return std::nullopt;
  // the j-th translate of a side is the isometric circle of pairing * T^{-j}
  const Mat2 M = best->pairing * mat2(1.0, (k - best_j) * F.width, 0.0, 1.0);
  return std::make_pair(embed_so21(M, f.plane), static_cast<int>(best->word.size()));
}

}  // namespace detail

inline Reduction reduce_to_region(const AmalgamRep& rep, const FundamentalRegion& R, int group, const ProjPoint& start,
                                  int L, int max_steps = 64) {
  ProjPoint p = start;
  int letters = 0;
  for (int step = 0; step < max_steps && letters <= L; ++step) {
    std::vector<int> order;
    if (group >= 0) {
      order = {group};
    } else {
      const int first = rep.region(p).region == Region::X2 ? 0 : 1;
      order = {first, 1 - first};
    }
    bool moved = false;
    for (int m : order) {
      if (auto st = detail::ford_step(rep, m, p)) {
        p = ProjPoint(st->first(p).lift().normalized());
        letters += st->second;
        moved = true;
        break;
      }
    }
    if (moved) continue;
    const HoroCoord h = to_horo(p);
    const int n = slab_shift(rep, h);
    const ProjPoint q = h_translation(n * rep.r)(p);
    if (membership(rep, R, q).margin >= -kMembershipTol) return {letters <= L, letters};
    return {false, letters};
  }
  return {false, letters};
}

/// N samples of the region are tested against every word; coverage_samples
/// ambient points (default N) are reduced into it.
inline VerificationReport check_fundamental_set(const AmalgamRep& rep, const FundamentalRegion& R, int group, int L,
                                                int N, std::uint64_t seed, int coverage_samples = -1) {
  if (coverage_samples < 0) coverage_samples = N;
  VerificationReport out;
  const std::string rname = R.which == 2 ? "Phi" : "Phi" + std::to_string(R.which + 1);
  const std::string gname = group < 0 ? "Gamma" : "Gamma" + std::to_string(group + 1);
  out.check_name = "fundamental_set_" + rname + "_" + gname;
  out.seed = seed;

  const std::vector<WordImage> words =
      group >= 0 ? factor_word_images(rep, group, L) : normal_form_images(rep, L, true);

  // no two sampled points are equivalent: no nontrivial d^n g maps a sample
  // back into the region (g up to length L, n arbitrary)
  Rng rng(seed, 500 + static_cast<std::uint64_t>(R.which) * 7 + static_cast<std::uint64_t>(group + 1));
  long long pairs = 0;
  for (int i = 0; i < N; ++i) {
    const HoroCoord p = sample_fundamental(rep, R, rng);
    const ProjPoint P = lift(p);
    ++out.samples_tested;
    for (const WordImage& g : words) {
      const ProjPoint q = g.image(P);
      ++pairs;
      double m = INFINITY;
      if (R.which == 0 || R.which == 2) m = std::min(m, bounded_margin(rep, 0, q));
      if (R.which == 1 || R.which == 2) m = std::min(m, bounded_margin(rep, 1, q));
      if (m > kMembershipTol) {
        // the slab is reached by some d^n: the image is in the region
        const HoroCoord hq = to_horo(q);
        const ProjPoint qs = h_translation(slab_shift(rep, hq) * rep.r)(q);
        m = std::min(m, membership(rep, R, qs).margin);
      }
      if (m > kMembershipTol) ++out.violations;
      out.record(-m, p, to_string(g.word));
    }
  }

  // every orbit meets the region: greedy reduction of ambient samples
  Rng amb(seed, 600 + static_cast<std::uint64_t>(R.which) * 7 + static_cast<std::uint64_t>(group + 1));
  long long covered = 0, undecided = 0;
  for (int i = 0; i < coverage_samples; ++i) {
    const Reduction red = reduce_to_region(rep, R, group, lift(sample_ambient(rep, amb)), L);
    if (red.covered)
      ++covered;
    else
      ++undecided;
  }
  out.undecided = undecided;
  out.undecided_of = coverage_samples;
  out.details["word_length"] = L;
  out.details["words"] = words.size();
  out.details["pairs_tested"] = pairs;
  out.details["coverage_samples"] = coverage_samples;
  out.details["covered"] = covered;
  return out;
}

// ---------------------------------------------------------------------------

inline VerificationReport nonidentity_words(const AmalgamRep& rep, int L, std::uint64_t seed, long long cap = 100000,
                                             double tol = 1e-6) {
  VerificationReport out;
  out.check_name = "nonidentity_words";
  out.seed = seed;
  const HoroCoord origin = HoroCoord::from_xyuv(0, 0, 1, 0);
  std::vector<Isometry> stack{Isometry::identity()};
  long long enumerated = 0;
  bool capped = false;
  // full reduced-word DFS keeps prefix images; normal-form test per word
  for_each_reduced_word(rep.presentation.num_generators(), L, [&](const Word& w) {
    if (enumerated >= cap) {
      capped = true;
      return false;
    }
    stack.resize(w.size());
    stack.push_back(rep.letter(w.front()) * stack.back());
    const NormalForm nf = normal_form(rep.presentation, w);
    if (nf.word() != w || nf.is_trivial()) return true;
    ++enumerated;
    ++out.samples_tested;
    const double dist = distance_from_scalar(stack.back().matrix());
    if (dist < tol) ++out.violations;
    out.record(dist, origin, to_string(w));
    return true;
  });
  if (capped) {
    Rng rng(seed, 700);
    const int n = rep.presentation.num_generators();
    for (long long i = 0; i < cap; ++i) {
      Word w;
      while (static_cast<int>(w.size()) < L) {
        const Letter l = (rng.integer(0, 1) ? 1 : -1) * gen_letter(rng.integer(0, n - 1));
        if (!w.empty() && w.back() == -l) continue;
        w.push_back(l);
      }
      const NormalForm nf = normal_form(rep.presentation, w);
      if (nf.is_trivial()) continue;
      ++out.samples_tested;
      const double dist = distance_from_scalar(rep.rho(nf.word()).matrix());
      if (dist < tol) ++out.violations;
      out.record(dist, origin, to_string(nf.word()));
    }
  }
  out.details["word_length"] = L;
  out.details["enumerated"] = enumerated;
  out.details["sampled_beyond_cap"] = capped;
  return out;
}

struct CensusEntry {
  Word word;
  Word conjugator;
  int d_power = 0;
  bool resolved = false;
};

/// Fixed point on the ideal boundary of a parabolic isometry.
inline ProjPoint parabolic_fixed_point(const Isometry& g) {
  const IsometryKind k = classify(g);
  const Mat3& M = g.matrix();
  const cplx tr = k.trace;
  const cplx disc = std::sqrt(4.0 * tr * tr - 12.0 * std::conj(tr));
  const cplx c1 = (2.0 * tr + disc) / 6.0, c2 = (2.0 * tr - disc) / 6.0;
  auto p = [&](cplx x) { return x * x * x - tr * x * x + std::conj(tr) * x - 1.0; };
  const cplx lam = std::abs(p(c1)) <= std::abs(p(c2)) ? c1 : c2;
  const cplx mu = 1.0 / (lam * lam);
  const Mat3 I = Mat3::Identity();
  Mat3 W;
  if (std::abs(lam - mu) < 1e-4) {
    const Mat3 N = M - lam * I;
    const Mat3 N2 = N * N;
    W = max_abs(N2) > 1e-8 * std::pow(max_abs(M), 2) ? N2 : N;
  } else {
    W = (M - lam * I) * (M - mu * I);
  }
  int col = 0;
  for (int j = 1; j < 3; ++j)
    if (W.col(j).norm() > W.col(col).norm()) col = j;
  return ProjPoint(W.col(col) / W.col(col).norm());
}

inline VerificationReport parabolic_census(const AmalgamRep& rep, int L, std::vector<CensusEntry>* entries = nullptr,
                                           std::uint64_t seed = 0) {
  VerificationReport out;
  out.check_name = "parabolic_census";
  out.seed = seed;
  const std::vector<WordImage> words = normal_form_images(rep, L, false);

  struct OrbitPoint {
    Word word;
    Isometry image;
    HoroCoord at;
  };
  std::vector<OrbitPoint> orbit;
  for (const WordImage& g : words) {
    const ProjPoint x = g.image(ProjPoint::infinity());
    if (x.is_infinity(1e-12)) continue;
    orbit.push_back({g.word, g.image, to_horo(x)});
  }

  long long parabolics = 0, elliptics = 0, unresolved = 0;
  nlohmann::ordered_json listed = nlohmann::ordered_json::array();
  const HoroCoord origin = HoroCoord::from_xyuv(0, 0, 1, 0);
  for (const WordImage& g : words) {
    ++out.samples_tested;
    // the kind is a conjugacy invariant, and the cyclic reduction keeps the
    // entries (and the rounding in the trace) small
    const Word core = cyclic_reduce(g.word);
    const IsometryKind kind = classify(core.size() < g.word.size() ? rep.rho(core) : g.image);
    if (kind.kind == Kind::Elliptic) ++elliptics;
    if (kind.kind != Kind::Parabolic) continue;
    ++parabolics;
    CensusEntry e;
    e.word = g.word;
    const ProjPoint xi = parabolic_fixed_point(g.image);
    // o^-1 g o is evaluated from the reduced word: forming it from the
    // matrices loses everything once their entries reach ~1e8
    auto try_conjugator = [&](const OrbitPoint& o) {
      const Word cw = free_reduce(concat(concat(inverse(o.word), g.word), o.word));
      const Isometry C = rep.rho(cw);
      const Mat3& c = C.matrix();
      const cplx w = c(2, 2);
      if (std::abs(w) < 0.5) return false;
      const int k = static_cast<int>(std::lround((c(0, 2) / w).real() / rep.r));
      if (k == 0) return false;
      const double scale = std::max(1.0, max_abs(c));
      if (distance_mod_scalar(C, h_translation(k * rep.r)) > 1e-6 * scale) return false;
      e.conjugator = o.word;
      e.d_power = k;
      e.resolved = true;
      return true;
    };
    static const OrbitPoint identity_point{{}, Isometry::identity(), {}};
    if (xi.is_infinity(1e-9)) {
      try_conjugator(identity_point);
    } else {
      // the fixed point of a long word is only accurate to a few digits, so
      // candidates are ranked by distance and confirmed by the conjugation
      const HoroCoord hx = to_horo(xi);
      const double scale = std::max({1.0, std::abs(hx.z), std::abs(hx.v)});
      std::vector<std::pair<double, const OrbitPoint*>> ranked;
      ranked.reserve(orbit.size());
      for (const OrbitPoint& o : orbit)
        ranked.push_back({std::max(std::abs(o.at.z - hx.z), std::abs(o.at.v - hx.v)) / scale, &o});
      auto closer = [](const auto& a, const auto& b) {
        return a.first < b.first || (a.first == b.first && a.second->word.size() < b.second->word.size());
      };
      // the nearest few almost always contain the answer; sort the rest only if not
      const size_t head = std::min<size_t>(64, ranked.size());
      std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(head), ranked.end(), closer);
      bool found = false;
      for (size_t i = 0; i < head && !found; ++i) found = try_conjugator(*ranked[i].second);
      if (!found) {
        std::sort(ranked.begin() + static_cast<std::ptrdiff_t>(head), ranked.end(), closer);
        for (size_t i = head; i < ranked.size() && !found; ++i) found = try_conjugator(*ranked[i].second);
      }
    }
    if (!e.resolved) {
      ++unresolved;
      out.record(-1.0, origin, to_string(e.word));
    } else {
      out.record(1.0, origin, to_string(e.word));
    }
    if (listed.size() < 200)
      listed.push_back({{"word", to_string(e.word)},
                        {"conjugator", e.resolved ? nlohmann::ordered_json(to_string(e.conjugator)) : nlohmann::ordered_json(nullptr)},
                        {"d_power", e.d_power},
                        {"resolved", e.resolved}});
    if (entries) entries->push_back(e);
  }
  // a torsion-free discrete group has no elliptics
  out.violations = unresolved + elliptics;
  out.details["word_length"] = L;
  out.details["parabolic"] = parabolics;
  out.details["elliptic"] = elliptics;
  out.details["unresolved"] = unresolved;
  out.details["entries"] = listed;
  return out;
}

}  // namespace chyp
