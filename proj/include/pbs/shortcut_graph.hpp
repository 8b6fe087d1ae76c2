#pragma once

// Valid-shortcut graphs: the pairwise (Imai–Iri style) construction for any
// bundle, and the cone sweep for single polylines and tree bundles.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pbs/geometry.hpp"
#include "pbs/tree_graph.hpp"

namespace pbs {

/// Adjacency over point ids. Tree builders store ancestor->descendant edges
/// (directed); the generic builder stores both orientations of each pair.
struct ShortcutGraph {
  std::size_t n = 0;
  bool directed = false;
  std::vector<std::vector<PointId>> adjacency;

  bool has_edge(PointId v, PointId w) const {
    const auto& adj = adjacency[v];
    return std::binary_search(adj.begin(), adj.end(), w);
  }

  std::size_t edge_count() const {
    std::size_t m = 0;
    for (const auto& a : adjacency) m += a.size();
    return directed ? m : m / 2;
  }

  /// Sorted "v w" lines; undirected graphs list each pair once with v < w.
  std::string dump() const {
    std::ostringstream os;
    for (PointId v = 0; v < adjacency.size(); ++v)
      for (PointId w : adjacency[v])
        if (directed || v < w) os << v << ' ' << w << '\n';
    return os.str();
  }

  friend bool operator==(const ShortcutGraph& a, const ShortcutGraph& b) {
    return a.n == b.n && a.directed == b.directed && a.adjacency == b.adjacency;
  }
};

namespace detail {

inline void sort_adjacency(ShortcutGraph& g) {
  for (auto& a : g.adjacency) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
}

inline std::uint64_t pair_key(PointId a, PointId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace detail

/// Generic pairwise construction. A pair is a shortcut iff the metric check
/// passes on every polyline containing both points (in either order).
inline ShortcutGraph build_naive(const Bundle& b, double delta, Metric metric) {
  check_bundle(b);
  // 1 = valid so far, 0 = known invalid.
  std::unordered_map<std::uint64_t, char> state;
  for (LineId l = 0; l < b.ell(); ++l) {
    const auto pts = b.line_points(l);
    const auto& ids = b.lines[l].points;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const auto key = detail::pair_key(ids[i], ids[j]);
        auto it = state.find(key);
        if (it != state.end() && it->second == 0) continue;
        const bool ok =
            j == i + 1 ||
            shortcut_ok(metric, std::span<const Point>(pts).subspan(i, j - i + 1), delta);
        if (it == state.end())
          state.emplace(key, ok ? 1 : 0);
        else
          it->second = ok ? 1 : 0;
      }
    }
  }
  ShortcutGraph g;
  g.n = b.n();
  g.directed = false;
  g.adjacency.assign(b.n(), {});
  for (const auto& [key, ok] : state) {
    if (!ok) continue;
    const auto v = static_cast<PointId>(key >> 32);
    const auto w = static_cast<PointId>(key & 0xffffffffu);
    g.adjacency[v].push_back(w);
    g.adjacency[w].push_back(v);
  }
  detail::sort_adjacency(g);
  return g;
}

namespace detail {

inline void check_tree_matches(const Bundle& b, const TreeGraph& tree) {
  if (tree.present.size() != b.n() || b.lines.empty() || b.lines[0].front() != tree.root)
    throw NotATreeBundle("tree graph does not belong to this bundle");
}

}  // namespace detail

/// Pairwise construction over ancestor/descendant pairs of a tree bundle.
/// Each pair has a unique tree path, so it is checked exactly once.
inline ShortcutGraph build_naive(const Bundle& b, const TreeGraph& tree, double delta,
                                 Metric metric) {
  detail::check_tree_matches(b, tree);
  ShortcutGraph g;
  g.n = b.n();
  g.directed = true;
  g.adjacency.assign(b.n(), {});
  std::vector<Point> path;
  std::vector<std::pair<PointId, std::size_t>> stack;
  for (PointId v : tree.postorder) {
    path.assign(1, b.points[v]);
    stack.assign(1, {v, 0});
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < tree.children[u].size()) {
        const PointId c = tree.children[u][next++];
        path.push_back(b.points[c]);
        const bool ok = path.size() == 2 || shortcut_ok(metric, path, delta);
        if (ok) g.adjacency[v].push_back(c);
        stack.emplace_back(c, 0);
      } else {
        stack.pop_back();
        path.pop_back();
      }
    }
  }
  detail::sort_adjacency(g);
  return g;
}

/// Angular region of admissible directions from an apex. Starts as the full
/// plane; each constraint is an interval narrower than a half-plane, so the
/// running intersection stays a single interval or becomes empty.
class Wedge {
public:
  enum class State { Full, Interval, Empty };

  State state() const { return state_; }
  Point lower() const { return lo_; }
  Point upper() const { return hi_; }

  /// Restrict to directions whose ray from apex passes within delta of o.
  void constrain(Point apex, Point o, double delta) {
    if (state_ == State::Empty) return;
    const Point v = o - apex;
    const double r = norm(v);
    if (r <= delta) return;
    const Point u{v.x / r, v.y / r};
    const double s = delta / r;
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    const Point lo{u.x * c + u.y * s, -u.x * s + u.y * c};
    const Point hi{u.x * c - u.y * s, u.x * s + u.y * c};
    if (state_ == State::Full) {
      lo_ = lo;
      hi_ = hi;
      state_ = State::Interval;
      return;
    }
    Point nlo, nhi;
    if (inside(lo, lo_, hi_))
      nlo = lo;
    else if (inside(lo_, lo, hi))
      nlo = lo_;
    else {
      state_ = State::Empty;
      return;
    }
    if (inside(hi, lo_, hi_))
      nhi = hi;
    else if (inside(hi_, lo, hi))
      nhi = hi_;
    else {
      state_ = State::Empty;
      return;
    }
    lo_ = nlo;
    hi_ = nhi;
  }

  /// Whether target is an admissible endpoint seen from apex.
  bool admits(Point apex, Point target) const {
    switch (state_) {
      case State::Full:
        return true;
      case State::Empty:
        return false;
      case State::Interval: {
        const Point d = target - apex;
        // Degenerate segment: only valid when no disk excluded the apex.
        if (d.x == 0.0 && d.y == 0.0) return false;
        return inside(d, lo_, hi_);
      }
    }
    return false;
  }

private:
  static bool inside(Point d, Point lo, Point hi) { return cross(lo, d) >= 0.0 && cross(d, hi) >= 0.0; }

  State state_ = State::Full;
  Point lo_{};
  Point hi_{};
};

/// Directed forward sweep over one polyline: every (i, j), i < j, such that
/// the ray from points[i] toward points[j] passes within delta of every
/// intermediate vertex.
inline std::vector<std::pair<std::size_t, std::size_t>> chan_chin_directed(
    std::span<const Point> points, double delta) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Wedge w;
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (w.admits(points[i], points[j])) out.emplace_back(i, j);
      w.constrain(points[i], points[j], delta);
      if (w.state() == Wedge::State::Empty) break;
    }
  }
  return out;
}

/// Undirected Hausdorff shortcuts of one polyline as index pairs (i < j):
/// a pair is valid iff both directed sweeps produce it.
inline std::vector<std::pair<std::size_t, std::size_t>> chan_chin_shortcuts(
    std::span<const Point> points, double delta) {
  const std::size_t n = points.size();
  std::vector<Point> reversed(points.rbegin(), points.rend());
  auto fwd = chan_chin_directed(points, delta);
  auto bwd = chan_chin_directed(reversed, delta);
  std::vector<std::pair<std::size_t, std::size_t>> back;
  back.reserve(bwd.size());
  for (auto [i, j] : bwd) back.emplace_back(n - 1 - j, n - 1 - i);
  std::sort(fwd.begin(), fwd.end());
  std::sort(back.begin(), back.end());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::set_intersection(fwd.begin(), fwd.end(), back.begin(), back.end(),
                        std::back_inserter(out));
  return out;
}

/// Hausdorff shortcut graph of a tree bundle in quadratic time: a root-ward
/// sweep along each node's unique root path, then a leaf-ward depth-first
/// sweep per node that copies the wedge at branchings.
inline ShortcutGraph build_tree_hausdorff(const Bundle& b, const TreeGraph& tree, double delta) {
  detail::check_tree_matches(b, tree);
  const auto& P = b.points;
  // rootward[w][k]: the ray from w toward its ancestor at depth k is admissible.
  std::vector<std::vector<char>> rootward(b.n());
  for (PointId w : tree.postorder) {
    auto& ok = rootward[w];
    ok.assign(tree.depth[w], 0);
    Wedge wedge;
    for (PointId a = tree.parent[w]; a != kNoPoint; a = tree.parent[a]) {
      if (wedge.admits(P[w], P[a])) ok[tree.depth[a]] = 1;
      wedge.constrain(P[w], P[a], delta);
      if (wedge.state() == Wedge::State::Empty) break;
    }
  }

  ShortcutGraph g;
  g.n = b.n();
  g.directed = true;
  g.adjacency.assign(b.n(), {});
  struct Frame {
    PointId node;
    Wedge wedge;  // constraints from the nodes strictly between v and node's children
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (PointId v : tree.postorder) {
    const std::uint32_t dv = tree.depth[v];
    stack.clear();
    stack.push_back({v, Wedge{}, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next == tree.children[f.node].size()) {
        stack.pop_back();
        continue;
      }
      const PointId c = tree.children[f.node][f.next++];
      Wedge wedge = f.wedge;
      if (wedge.admits(P[v], P[c]) && rootward[c][dv]) g.adjacency[v].push_back(c);
      wedge.constrain(P[v], P[c], delta);
      if (wedge.state() != Wedge::State::Empty && !tree.children[c].empty())
        stack.push_back({c, wedge, 0});
    }
  }
  detail::sort_adjacency(g);
  return g;
}

}  // namespace pbs
