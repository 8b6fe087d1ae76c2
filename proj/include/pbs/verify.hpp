#pragma once

// Oracles and validators: simplification checking, achieved-distance
// measurement, exhaustive PBS and minimum-link paths.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "pbs/geometry.hpp"
#include "pbs/shortcut_graph.hpp"

namespace pbs {

class OracleError : public Error {
public:
  using Error::Error;
};

/// Exact decision value of one shortcut under a metric, measured to 1e-9
/// relative tolerance. Hausdorff is computed in closed form; Fréchet by
/// bisection over the decision procedure. The returned value always passes
/// the decision.
inline double shortcut_distance(Metric metric, std::span<const Point> sub) {
  const Point a = sub.front(), b = sub.back();
  double lo = 0.0;
  for (const Point& v : sub) lo = std::max(lo, point_segment_distance(v, a, b));
  if (metric == Metric::Hausdorff) return lo;
  if (frechet_ok(a, b, sub, lo)) return lo;
  double hi = std::max(lo * 2.0, 1e-300);
  while (!frechet_ok(a, b, sub, hi)) hi *= 2.0;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (frechet_ok(a, b, sub, mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

struct LineSimplification {
  std::vector<PointId> kept;  // induced simplification in line order
  double achieved = 0.0;      // max segment-wise distance
};

/// A consistent simplification: one global kept set and what it induces on
/// every line.
struct Simplification {
  std::vector<PointId> kept;  // sorted
  std::vector<LineSimplification> per_line;
  Metric metric = Metric::Frechet;

  std::size_t size() const { return kept.size(); }
  double max_achieved() const {
    double m = 0.0;
    for (const auto& l : per_line) m = std::max(m, l.achieved);
    return m;
  }
};

struct WorstSegment {
  LineId line = 0;
  PointId from = kNoPoint;
  PointId to = kNoPoint;
  double distance = 0.0;
};

struct ValidationReport {
  bool valid = true;
  bool endpoints_kept = true;
  bool consistency = true;  // always true for a single global set
  std::vector<double> per_line;
  WorstSegment worst;
  std::string message;
};

namespace detail {

inline std::vector<char> kept_mask(const Bundle& b, std::span<const PointId> kept) {
  std::vector<char> mask(b.n(), 0);
  for (PointId id : kept) {
    if (id >= b.n()) throw Error("kept point " + std::to_string(id) + " is not in the bundle");
    mask[id] = 1;
  }
  return mask;
}

}  // namespace detail

inline ValidationReport validate_simplification(const Bundle& b, std::span<const PointId> kept,
                                                double delta, Metric metric) {
  check_bundle(b);
  const auto mask = detail::kept_mask(b, kept);
  ValidationReport r;
  r.per_line.assign(b.ell(), 0.0);
  r.worst.distance = -1.0;
  for (LineId l = 0; l < b.ell(); ++l) {
    const auto& ids = b.lines[l].points;
    if (!mask[ids.front()] || !mask[ids.back()]) {
      r.endpoints_kept = false;
      r.valid = false;
      if (r.message.empty()) r.message = "line " + std::to_string(l) + " loses an endpoint";
    }
    const auto pts = b.line_points(l);
    std::size_t prev = 0;
    for (std::size_t i = 1; i < ids.size(); ++i) {
      if (!mask[ids[i]] && i + 1 != ids.size()) continue;
      const auto sub = std::span<const Point>(pts).subspan(prev, i - prev + 1);
      const double d = i == prev + 1 ? 0.0 : shortcut_distance(metric, sub);
      const bool ok = i == prev + 1 || shortcut_ok(metric, sub, delta);
      r.per_line[l] = std::max(r.per_line[l], d);
      if (d > r.worst.distance) r.worst = {l, ids[prev], ids[i], d};
      if (!ok && r.valid) {
        r.valid = false;
        r.message = "line " + std::to_string(l) + " segment " + std::to_string(ids[prev]) + "-" +
                    std::to_string(ids[i]) + " exceeds the threshold";
      }
      prev = i;
    }
  }
  if (r.worst.distance < 0.0) r.worst.distance = 0.0;
  return r;
}

/// Fill per-line induced simplifications and achieved distances for a kept set.
inline Simplification make_simplification(const Bundle& b, std::vector<PointId> kept,
                                          Metric metric) {
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  const auto mask = detail::kept_mask(b, kept);
  Simplification s;
  s.metric = metric;
  s.kept = std::move(kept);
  s.per_line.resize(b.ell());
  for (LineId l = 0; l < b.ell(); ++l) {
    const auto& ids = b.lines[l].points;
    const auto pts = b.line_points(l);
    auto& out = s.per_line[l];
    std::size_t prev = kNoPoint;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!mask[ids[i]]) continue;
      out.kept.push_back(ids[i]);
      if (prev != kNoPoint && i > prev + 1)
        out.achieved = std::max(
            out.achieved,
            shortcut_distance(metric, std::span<const Point>(pts).subspan(prev, i - prev + 1)));
      prev = i;
    }
  }
  return s;
}

/// Exhaustive PBS: kept sets are enumerated by increasing size, and within a
/// size in lexicographic order of the removable points.
inline std::vector<PointId> brute_force_pbs(const Bundle& b, double delta, Metric metric,
                                            std::size_t cap = 20) {
  check_bundle(b);
  std::vector<char> endpoint(b.n(), 0), used(b.n(), 0);
  for (const auto& line : b.lines) {
    endpoint[line.front()] = endpoint[line.back()] = 1;
    for (PointId id : line.points) used[id] = 1;
  }
  std::vector<PointId> removable, fixed;
  for (PointId v = 0; v < b.n(); ++v) {
    if (!used[v]) continue;
    (endpoint[v] ? fixed : removable).push_back(v);
  }
  if (removable.size() > cap)
    throw OracleError("brute force refused: " + std::to_string(removable.size()) +
                      " removable points exceed cap " + std::to_string(cap));

  // valid[l][i * len + j]: sub-polyline i..j of line l is a valid shortcut.
  std::vector<std::vector<char>> valid(b.ell());
  for (LineId l = 0; l < b.ell(); ++l) {
    const auto pts = b.line_points(l);
    const std::size_t len = pts.size();
    valid[l].assign(len * len, 0);
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t j = i + 1; j < len; ++j)
        valid[l][i * len + j] =
            j == i + 1 || shortcut_ok(metric, std::span<const Point>(pts).subspan(i, j - i + 1),
                                      delta);
  }
  std::vector<char> mask(b.n(), 0);
  for (PointId v : fixed) mask[v] = 1;
  auto feasible = [&]() {
    for (LineId l = 0; l < b.ell(); ++l) {
      const auto& ids = b.lines[l].points;
      const std::size_t len = ids.size();
      std::size_t prev = 0;
      for (std::size_t i = 1; i < len; ++i) {
        if (!mask[ids[i]]) continue;
        if (!valid[l][prev * len + i]) return false;
        prev = i;
      }
    }
    return true;
  };
  const std::size_t r = removable.size();
  for (std::size_t k = 0; k <= r; ++k) {
    std::vector<std::size_t> comb(k);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      for (std::size_t idx : comb) mask[removable[idx]] = 1;
      const bool ok = feasible();
      for (std::size_t idx : comb) mask[removable[idx]] = 0;
      if (ok) {
        std::vector<PointId> out = fixed;
        for (std::size_t idx : comb) out.push_back(removable[idx]);
        std::sort(out.begin(), out.end());
        return out;
      }
      // next combination in lexicographic order
      std::size_t i = k;
      while (i > 0 && comb[i - 1] == r - k + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  throw OracleError("no feasible kept set found");  // unreachable: keeping all is valid
}

/// Minimum number of shortcut edges from s to t (BFS).
inline std::size_t min_link_path(const ShortcutGraph& g, PointId s, PointId t) {
  if (s >= g.n || t >= g.n) throw Error("min_link_path: node out of range");
  std::vector<std::size_t> dist(g.n, static_cast<std::size_t>(-1));
  std::deque<PointId> queue{s};
  dist[s] = 0;
  while (!queue.empty()) {
    const PointId v = queue.front();
    queue.pop_front();
    if (v == t) return dist[v];
    for (PointId w : g.adjacency[v]) {
      if (dist[w] != static_cast<std::size_t>(-1)) continue;
      dist[w] = dist[v] + 1;
      queue.push_back(w);
    }
  }
  throw Error("min_link_path: target unreachable");
}

/// Benchmark row in the column order "algo,delta,delta_f,ratio,n,ell,size,time_ms".
struct ResultRow {
  std::string algo;
  double delta = 0.0;
  double delta_f = 0.0;
  double ratio = 0.0;
  std::size_t n = 0;
  std::size_t ell = 0;
  std::size_t size = 0;
  double time_ms = 0.0;

  static constexpr const char* kHeader = "algo,delta,delta_f,ratio,n,ell,size,time_ms";

  std::string csv() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.6g,%zu,%zu,%zu,%.3f", algo.c_str(), delta,
                  delta_f, ratio, n, ell, size, time_ms);
    return buf;
  }
};

inline ResultRow make_row(std::string algo, double delta, const Bundle& b,
                          const Simplification& s, double time_ms) {
  ResultRow row;
  row.algo = std::move(algo);
  row.delta = delta;
  row.delta_f = s.max_achieved();
  row.ratio = delta > 0.0 ? row.delta_f / delta : 0.0;
  row.n = b.n();
  row.ell = b.ell();
  row.size = s.size();
  row.time_ms = time_ms;
  return row;
}

}  // namespace pbs
