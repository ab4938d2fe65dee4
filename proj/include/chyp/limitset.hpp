#pragma once

// Finite approximations of the limit set: the orbit of a boundary point
// (by default infinity) under normal-form words, in Heisenberg coordinates.

#include "chyp/amalgam.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace chyp {

inline constexpr double kBoundaryTol = 1e-9;
inline constexpr double kDedupGrid = 1e-8;

struct CloudPoint {
  double x = 0.0, y = 0.0, v = 0.0;
  int wordlen = 0;
};

struct OrbitCloud {
  std::vector<CloudPoint> points;
  /// Words (shortest first) whose image of the base point is infinity.
  std::vector<std::string> infinity_words;
  bool base_is_infinity = false;
  long long rejected = 0;  // images failing the boundary equation
  double max_residual = 0.0;  // over accepted images, before conversion

  size_t size() const { return points.size() + (infinity_words.empty() && !base_is_infinity ? 0 : 1); }
};

namespace detail {

using GridKey = std::tuple<long long, long long, long long>;

inline GridKey grid_key(double x, double y, double v) {
  return {std::llround(x / kDedupGrid), std::llround(y / kDedupGrid), std::llround(v / kDedupGrid)};
}

inline std::runtime_error io_error(const std::string& what, const std::string& path) {
  return std::runtime_error(what + " '" + path + "': " + std::strerror(errno));
}

}  // namespace detail

/// Self-pairing of the unit lift: zero exactly on the boundary.
inline double boundary_residual(const Vec3& X) { return std::abs(herm(X, X).real()) / X.squaredNorm(); }

/// Images of `base` under every normal-form word of length <= L (and the
/// identity), deduplicated on a 1e-8 grid in (x, y, v), keeping the shortest
/// word length.  Images of infinity are recorded separately.
inline OrbitCloud orbit_boundary(const AmalgamRep& rep, int L, const ProjPoint& base = ProjPoint::infinity()) {
  if (L < 0) throw std::invalid_argument("orbit_boundary: L must be >= 0");
  if (!base.is_boundary(kBoundaryTol)) throw DomainError("orbit_boundary: base point is not on the boundary");
  OrbitCloud cloud;
  std::map<detail::GridKey, size_t> index;
  const Vec3 b = base.lift() / base.lift().norm();

  auto add = [&](const Vec3& X, const Word& w) {
    const double res = boundary_residual(X);
    if (res > kBoundaryTol) {
      ++cloud.rejected;
      return;
    }
    cloud.max_residual = std::max(cloud.max_residual, res);
    const ProjPoint p(X);
    if (p.is_infinity(1e-13)) {
      if (w.empty())
        cloud.base_is_infinity = true;
      else
        cloud.infinity_words.push_back(to_string(w));
      return;
    }
    const HoroCoord h = to_horo(p);
    const CloudPoint c{h.x(), h.y(), h.v, static_cast<int>(w.size())};
    const auto [it, fresh] = index.emplace(detail::grid_key(c.x, c.y, c.v), cloud.points.size());
    if (fresh)
      cloud.points.push_back(c);
    else if (c.wordlen < cloud.points[it->second].wordlen)
      cloud.points[it->second].wordlen = c.wordlen;
  };

  add(b, {});
  for_each_normal_form(rep.presentation, L, [&](const Word& w) {
    Vec3 X = b;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      X = rep.letter(*it).matrix() * X;
      X /= X.norm();
    }
    add(X, w);
  });
  std::sort(cloud.infinity_words.begin(), cloud.infinity_words.end(), [](const std::string& a, const std::string& b) {
    return std::make_pair(a.size(), a) < std::make_pair(b.size(), b);
  });
  std::sort(cloud.points.begin(), cloud.points.end(), [](const CloudPoint& a, const CloudPoint& b) {
    return std::tie(a.wordlen, a.x, a.y, a.v) < std::tie(b.wordlen, b.x, b.y, b.v);
  });
  return cloud;
}

/// True if some cloud point lies within `tol` of (x, y, v) in every coordinate.
inline bool cloud_contains(const OrbitCloud& cloud, double x, double y, double v, double tol = 1e-7) {
  for (const CloudPoint& p : cloud.points)
    if (std::abs(p.x - x) <= tol * std::max(1.0, std::abs(x)) && std::abs(p.y - y) <= tol * std::max(1.0, std::abs(y)) &&
        std::abs(p.v - v) <= tol * std::max(1.0, std::abs(v)))
      return true;
  return false;
}

// ---------------------------------------------------------------------------
// CSV: header x,y,v,wordlen; values with 17 significant digits.

inline void write_cloud_csv(std::ostream& os, const OrbitCloud& cloud) {
  os << "x,y,v,wordlen\n";
  char buf[128];
  for (const CloudPoint& p : cloud.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", p.x, p.y, p.v, p.wordlen);
    os << buf;
  }
}

inline void write_cloud_csv(const std::string& path, const OrbitCloud& cloud) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw detail::io_error("cannot open", path);
  write_cloud_csv(f, cloud);
  if (!f) throw detail::io_error("cannot write", path);
}

inline OrbitCloud read_cloud_csv(std::istream& is) {
  OrbitCloud cloud;
  std::string line;
  if (!std::getline(is, line) || line != "x,y,v,wordlen") throw std::runtime_error("cloud csv: bad header");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    CloudPoint p;
    char c1, c2, c3;
    std::istringstream in(line);
    if (!(in >> p.x >> c1 >> p.y >> c2 >> p.v >> c3 >> p.wordlen) || c1 != ',' || c2 != ',' || c3 != ',')
      throw std::runtime_error("cloud csv: malformed line " + std::to_string(lineno));
    cloud.points.push_back(p);
  }
  return cloud;
}

inline OrbitCloud read_cloud_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw detail::io_error("cannot open", path);
  return read_cloud_csv(f);
}

// ---------------------------------------------------------------------------
// Raster: orthographic projection to (x, y), coloured by v.

struct Raster {
  int width = 1024, height = 1024;
  std::vector<unsigned char> rgb;  // row-major, 3 bytes per pixel
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
};

namespace detail {

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  const size_t k = static_cast<size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

inline std::array<unsigned char, 3> colormap(double s) {
  static const double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  s = std::clamp(s, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(s));
  const double f = s - i;
  std::array<unsigned char, 3> c;
  for (int k = 0; k < 3; ++k) c[k] = static_cast<unsigned char>(std::lround(stops[i][k] * (1 - f) + stops[i + 1][k] * f));
  return c;
}

}  // namespace detail

/// Bounds are the 1%-99% quantiles of x and y (the orbit accumulates far
/// out near infinity), padded by 5% and made square.
inline Raster rasterize(const OrbitCloud& cloud, int size = 1024) {
  Raster r;
  r.width = r.height = size;
  r.rgb.assign(static_cast<size_t>(size) * size * 3, 255);
  if (cloud.points.empty()) return r;
  std::vector<double> xs, ys, vs;
  for (const CloudPoint& p : cloud.points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
    vs.push_back(p.v);
  }
  const double xl = detail::quantile(xs, 0.01), xh = detail::quantile(xs, 0.99);
  const double yl = detail::quantile(ys, 0.01), yh = detail::quantile(ys, 0.99);
  const double vl = detail::quantile(vs, 0.01), vh = detail::quantile(vs, 0.99);
  const double half = 0.5 * 1.05 * std::max({xh - xl, yh - yl, 1e-9});
  const double cx = 0.5 * (xl + xh), cy = 0.5 * (yl + yh);
  r.x0 = cx - half;
  r.x1 = cx + half;
  r.y0 = cy - half;
  r.y1 = cy + half;
  // draw in order of v so the picture does not depend on the cloud order
  std::vector<size_t> order(cloud.points.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::tie(cloud.points[a].v, cloud.points[a].x, cloud.points[a].y) <
           std::tie(cloud.points[b].v, cloud.points[b].x, cloud.points[b].y);
  });
  for (size_t i : order) {
    const CloudPoint& p = cloud.points[i];
    const double fx = (p.x - r.x0) / (r.x1 - r.x0), fy = (p.y - r.y0) / (r.y1 - r.y0);
    if (fx < 0 || fx >= 1 || fy < 0 || fy >= 1) continue;
    const int col = static_cast<int>(fx * size), row = size - 1 - static_cast<int>(fy * size);
    const auto c = detail::colormap(vh > vl ? (p.v - vl) / (vh - vl) : 0.5);
    std::memcpy(&r.rgb[(static_cast<size_t>(row) * size + col) * 3], c.data(), 3);
  }
  return r;
}

}  // namespace chyp
