#pragma once

// Planar primitives, polyline bundles and the two segment-vs-subpolyline
// distance decisions that define shortcut validity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbs {

using PointId = std::uint32_t;
using LineId = std::uint32_t;

inline constexpr PointId kNoPoint = std::numeric_limits<PointId>::max();

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed bundle (bad index, non-simple line, non-finite coordinate).
class BundleError : public Error {
public:
  using Error::Error;
};

/// A shortcut query whose sub-polyline does not start/end at the segment ends.
class ShortcutQueryError : public Error {
public:
  using Error::Error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

struct Polyline {
  std::vector<PointId> points;

  std::size_t size() const { return points.size(); }
  PointId front() const { return points.front(); }
  PointId back() const { return points.back(); }
  PointId operator[](std::size_t i) const { return points[i]; }

  friend bool operator==(const Polyline&, const Polyline&) = default;
};

/// Point table plus polylines given as index lists into it. The distance
/// threshold is a runtime parameter of each algorithm and is not stored.
struct Bundle {
  std::vector<Point> points;
  std::vector<Polyline> lines;

  std::size_t n() const { return points.size(); }
  std::size_t ell() const { return lines.size(); }

  std::vector<Point> line_points(LineId l) const {
    std::vector<Point> out;
    out.reserve(lines[l].size());
    for (PointId id : lines[l].points) out.push_back(points[id]);
    return out;
  }

  friend bool operator==(const Bundle&, const Bundle&) = default;
};

/// Throws BundleError unless every invariant of a bundle holds.
inline void check_bundle(const Bundle& b) {
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    if (!std::isfinite(b.points[i].x) || !std::isfinite(b.points[i].y))
      throw BundleError("point " + std::to_string(i) + " has a non-finite coordinate");
  }
  std::vector<std::uint32_t> seen(b.points.size(), 0);
  for (std::size_t l = 0; l < b.lines.size(); ++l) {
    const auto& line = b.lines[l].points;
    if (line.size() < 2)
      throw BundleError("line " + std::to_string(l) + " has fewer than two points");
    for (PointId id : line) {
      if (id >= b.points.size())
        throw BundleError("line " + std::to_string(l) + " references point " +
                          std::to_string(id) + " out of range");
      if (seen[id] == l + 1)
        throw BundleError("line " + std::to_string(l) + " repeats point " + std::to_string(id));
      seen[id] = static_cast<std::uint32_t>(l + 1);
    }
  }
}

enum class Metric { Hausdorff, Frechet };

inline const char* to_string(Metric m) { return m == Metric::Hausdorff ? "hausdorff" : "frechet"; }

inline Metric parse_metric(const std::string& s) {
  if (s == "hausdorff") return Metric::Hausdorff;
  if (s == "frechet") return Metric::Frechet;
  throw Error("unknown metric '" + s + "'");
}

/// Euclidean distance from p to the closed segment ab (a == b allowed).
inline double point_segment_distance(Point p, Point a, Point b) {
  const Point d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return distance(p, a + t * d);
}

namespace detail {

inline void check_endpoints(Point a, Point b, std::span<const Point> sub) {
  if (sub.size() < 2 || !(sub.front() == a) || !(sub.back() == b))
    throw ShortcutQueryError("sub-polyline does not start and end at the segment endpoints");
}

}  // namespace detail

/// Vertex-max Hausdorff decision. Exact here because the segment endpoints
/// coincide with the sub-polyline endpoints and point-to-segment distance is
/// convex along each sub-edge.
inline bool hausdorff_ok(Point a, Point b, std::span<const Point> sub, double delta) {
  detail::check_endpoints(a, b, sub);
  for (std::size_t i = 1; i + 1 < sub.size(); ++i)
    if (point_segment_distance(sub[i], a, b) > delta) return false;
  return true;
}

/// Parameter interval [lo, hi] of segment a + t(b - a) within delta of v.
/// Returns false when the disk misses the supporting line.
inline bool disk_chord(Point a, Point d, double len2, Point v, double delta, double& lo,
                       double& hi) {
  const Point diff = a - v;
  const double bq = 2.0 * dot(d, diff);
  const double cq = dot(diff, diff) - delta * delta;
  const double disc = bq * bq - 4.0 * len2 * cq;
  if (disc < 0.0) return false;
  const double sq = std::sqrt(disc);
  lo = (-bq - sq) / (2.0 * len2);
  hi = (-bq + sq) / (2.0 * len2);
  return true;
}

/// Fréchet decision between segment ab and a polyline from a to b. The free
/// space is a single column of cells; we sweep the vertices and keep the
/// smallest reachable parameter on the segment.
inline bool frechet_ok(Point a, Point b, std::span<const Point> sub, double delta) {
  detail::check_endpoints(a, b, sub);
  const Point d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) {
    for (const Point& v : sub)
      if (distance(v, a) > delta) return false;
    return true;
  }
  double t_min = 0.0;
  for (std::size_t i = 1; i < sub.size(); ++i) {
    double lo = 0.0, hi = 0.0;
    if (!disk_chord(a, d, len2, sub[i], delta, lo, hi)) return false;
    if (lo > 1.0 || hi < t_min) return false;
    t_min = std::max(t_min, lo);
  }
  return true;
}

inline bool shortcut_ok(Metric m, std::span<const Point> sub, double delta) {
  return m == Metric::Hausdorff ? hausdorff_ok(sub.front(), sub.back(), sub, delta)
                                : frechet_ok(sub.front(), sub.back(), sub, delta);
}

}  // namespace pbs
