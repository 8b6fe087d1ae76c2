#pragma once

// Greedy tree-bundle decomposition of general bundles and the combined
// decomposition + tree DP simplification.

#include <algorithm>
#include <atomic>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <vector>

#include "pbs/tree_bundle.hpp"

namespace pbs {

struct UnionEdge {
  PointId a = kNoPoint;  // a < b
  PointId b = kNoPoint;
  std::vector<LineId> lines;  // sorted, nonempty

  PointId other(PointId v) const { return v == a ? b : a; }
};

struct UnionGraph {
  std::size_t n = 0;
  std::vector<UnionEdge> edges;
  std::vector<std::vector<std::uint32_t>> incident;
  std::vector<std::uint32_t> line_degree;
};

inline UnionGraph build_union_graph(const Bundle& b) {
  check_bundle(b);
  UnionGraph g;
  g.n = b.n();
  g.incident.assign(b.n(), {});
  g.line_degree.assign(b.n(), 0);
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  for (LineId l = 0; l < b.ell(); ++l) {
    const auto& ids = b.lines[l].points;
    for (PointId v : ids) ++g.line_degree[v];
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      const auto key = detail::pair_key(ids[i], ids[i + 1]);
      auto [it, inserted] = index.emplace(key, static_cast<std::uint32_t>(g.edges.size()));
      if (inserted) {
        UnionEdge e;
        e.a = std::min(ids[i], ids[i + 1]);
        e.b = std::max(ids[i], ids[i + 1]);
        g.edges.push_back(std::move(e));
        g.incident[g.edges.back().a].push_back(it->second);
        g.incident[g.edges.back().b].push_back(it->second);
      }
      auto& lines = g.edges[it->second].lines;
      if (lines.empty() || lines.back() != l) lines.push_back(l);
    }
  }
  return g;
}

/// A D-split piece of one line: indices [begin, end] of the line, with
/// `points` oriented so that it starts at the component root.
struct SubPolyline {
  LineId line = 0;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::vector<PointId> points;
};

struct Component {
  PointId root = kNoPoint;
  std::vector<SubPolyline> members;
};

struct Decomposition {
  std::vector<PointId> d_set;  // sorted
  std::vector<Component> components;

  friend bool operator==(const Decomposition& x, const Decomposition& y) {
    if (x.d_set != y.d_set || x.components.size() != y.components.size()) return false;
    for (std::size_t i = 0; i < x.components.size(); ++i) {
      const auto& a = x.components[i];
      const auto& b = y.components[i];
      if (a.root != b.root || a.members.size() != b.members.size()) return false;
      for (std::size_t k = 0; k < a.members.size(); ++k)
        if (a.members[k].line != b.members[k].line || a.members[k].begin != b.members[k].begin ||
            a.members[k].points != b.members[k].points)
          return false;
    }
    return true;
  }
};

struct DecompositionReport {
  bool ok = true;
  std::string message;
};

namespace detail {

inline std::vector<SubPolyline> d_split(const Bundle& b, const std::vector<char>& in_d) {
  std::vector<SubPolyline> out;
  for (LineId l = 0; l < b.ell(); ++l) {
    const auto& ids = b.lines[l].points;
    std::uint32_t start = 0;
    for (std::uint32_t i = 1; i < ids.size(); ++i) {
      if (!in_d[ids[i]]) continue;
      SubPolyline s;
      s.line = l;
      s.begin = start;
      s.end = i;
      s.points.assign(ids.begin() + start, ids.begin() + i + 1);
      out.push_back(std::move(s));
      start = i;
    }
  }
  return out;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  }
};

// Connected components of the intersection graph: pieces sharing a point
// outside D. Components are ordered by their first piece.
inline std::vector<std::vector<SubPolyline>> intersection_components(
    const Bundle& b, const std::vector<char>& in_d) {
  auto pieces = d_split(b, in_d);
  DisjointSets ds(pieces.size());
  std::vector<std::size_t> owner(b.n(), static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < pieces.size(); ++k)
    for (std::size_t i = 1; i + 1 < pieces[k].points.size(); ++i) {
      const PointId v = pieces[k].points[i];
      if (owner[v] == static_cast<std::size_t>(-1))
        owner[v] = k;
      else
        ds.unite(owner[v], k);
    }
  std::map<std::size_t, std::vector<SubPolyline>> groups;
  for (std::size_t k = 0; k < pieces.size(); ++k) groups[ds.find(k)].push_back(std::move(pieces[k]));
  std::vector<std::vector<SubPolyline>> out;
  for (auto& [_, g] : groups) out.push_back(std::move(g));
  return out;
}

// The endpoint shared by every piece; among two candidates the higher line
// degree wins, then the lower id. kNoPoint if none exists.
inline PointId component_root(const std::vector<SubPolyline>& members,
                              const std::vector<std::uint32_t>& line_degree) {
  std::vector<PointId> cand{members[0].points.front(), members[0].points.back()};
  std::erase_if(cand, [&](PointId c) {
    return !std::all_of(members.begin(), members.end(), [&](const SubPolyline& s) {
      return s.points.front() == c || s.points.back() == c;
    });
  });
  if (cand.empty()) return kNoPoint;
  if (cand.size() == 1) return cand[0];
  auto better = [&](PointId x, PointId y) {
    return line_degree[x] != line_degree[y] ? line_degree[x] > line_degree[y] : x < y;
  };
  return better(cand[0], cand[1]) ? cand[0] : cand[1];
}

inline void orient(std::vector<SubPolyline>& members, PointId root) {
  for (auto& s : members)
    if (s.points.front() != root) std::reverse(s.points.begin(), s.points.end());
}

inline std::vector<std::uint32_t> line_degrees(const Bundle& b) {
  std::vector<std::uint32_t> deg(b.n(), 0);
  for (const auto& line : b.lines)
    for (PointId v : line.points) ++deg[v];
  return deg;
}

}  // namespace detail

/// Greedy decomposition: roots are picked by maximum line degree and trees
/// grow breadth-first over union-graph edges while every incident edge of
/// the frontier node is unvisited, carries a subset of the incoming edge's
/// lines and leads to a node the tree has not reached yet; otherwise the
/// frontier node joins D.
inline Decomposition greedy_tbd(const Bundle& b) {
  const UnionGraph g = build_union_graph(b);
  const std::size_t n = b.n();
  std::vector<char> in_d(n, 0), assigned(n, 0), visited(g.edges.size(), 0);
  std::vector<std::uint32_t> reached(n, 0);  // tree stamp; reached once per tree
  std::uint32_t stamp = 0;
  for (const auto& line : b.lines) in_d[line.front()] = in_d[line.back()] = 1;

  std::vector<PointId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](PointId x, PointId y) {
    return g.line_degree[x] > g.line_degree[y];
  });

  struct Item {
    std::uint32_t edge;
    PointId to;
  };
  std::deque<Item> queue;
  for (PointId r : order) {
    if (assigned[r] || g.incident[r].empty()) continue;
    in_d[r] = 1;
    assigned[r] = 1;
    reached[r] = ++stamp;
    for (std::uint32_t e : g.incident[r]) {
      visited[e] = 1;
      const PointId to = g.edges[e].other(r);
      assigned[to] = 1;
      reached[to] = stamp;
      queue.push_back({e, to});
    }
    while (!queue.empty()) {
      const Item it = queue.front();
      queue.pop_front();
      const PointId v = it.to;
      if (in_d[v]) continue;
      const auto& in_lines = g.edges[it.edge].lines;
      bool expand = true;
      for (std::uint32_t e : g.incident[v]) {
        if (e == it.edge) continue;
        const auto& lines = g.edges[e].lines;
        if (visited[e] || reached[g.edges[e].other(v)] == stamp ||
            !std::includes(in_lines.begin(), in_lines.end(), lines.begin(), lines.end())) {
          expand = false;
          break;
        }
      }
      if (!expand) {
        in_d[v] = 1;
        continue;
      }
      for (std::uint32_t e : g.incident[v]) {
        if (e == it.edge) continue;
        visited[e] = 1;
        const PointId to = g.edges[e].other(v);
        assigned[to] = 1;
        reached[to] = stamp;
        queue.push_back({e, to});
      }
    }
  }
  // Every edge never reached by a tree joins two D points; it forms its own
  // single-segment component below.

  Decomposition dec;
  for (PointId v = 0; v < n; ++v)
    if (in_d[v]) dec.d_set.push_back(v);
  for (auto& members : detail::intersection_components(b, in_d)) {
    Component c;
    c.root = detail::component_root(members, g.line_degree);
    detail::orient(members, c.root);
    c.members = std::move(members);
    dec.components.push_back(std::move(c));
  }
  return dec;
}

/// Local tree bundle of one component plus the local->global point map.
inline std::pair<Bundle, std::vector<PointId>> component_bundle(const Bundle& b,
                                                                const Component& c) {
  std::unordered_map<PointId, PointId> local;
  std::pair<Bundle, std::vector<PointId>> out;
  auto& [sub, global] = out;
  auto id = [&](PointId v) {
    auto [it, inserted] = local.emplace(v, static_cast<PointId>(global.size()));
    if (inserted) {
      global.push_back(v);
      sub.points.push_back(b.points[v]);
    }
    return it->second;
  };
  id(c.root);
  for (const auto& m : c.members) {
    Polyline pl;
    for (PointId v : m.points) pl.points.push_back(id(v));
    sub.lines.push_back(std::move(pl));
  }
  return out;
}

inline DecompositionReport validate_decomposition(const Bundle& b, const Decomposition& dec) {
  check_bundle(b);
  DecompositionReport rep;
  auto fail = [&](std::string msg) {
    rep.ok = false;
    rep.message = std::move(msg);
    return rep;
  };
  std::vector<char> in_d(b.n(), 0);
  for (PointId v : dec.d_set) {
    if (v >= b.n()) return fail("decomposition point " + std::to_string(v) + " out of range");
    in_d[v] = 1;
  }
  for (LineId l = 0; l < b.ell(); ++l)
    if (!in_d[b.lines[l].front()] || !in_d[b.lines[l].back()])
      return fail("line " + std::to_string(l) + " has an endpoint outside D");

  auto expected = detail::intersection_components(b, in_d);
  using Key = std::vector<std::pair<LineId, std::uint32_t>>;
  auto key_of = [](const std::vector<SubPolyline>& ms) {
    Key k;
    for (const auto& m : ms) k.emplace_back(m.line, m.begin);
    std::sort(k.begin(), k.end());
    return k;
  };
  std::vector<Key> want, have;
  for (const auto& e : expected) want.push_back(key_of(e));
  for (const auto& c : dec.components) have.push_back(key_of(c.members));
  std::sort(want.begin(), want.end());
  std::sort(have.begin(), have.end());
  if (want != have) return fail("components do not match the intersection graph of D");

  for (std::size_t ci = 0; ci < dec.components.size(); ++ci) {
    const auto& c = dec.components[ci];
    for (const auto& m : c.members) {
      if (m.line >= b.ell() || m.end >= b.lines[m.line].size() || m.begin >= m.end)
        return fail("component " + std::to_string(ci) + " has a malformed member");
      std::vector<PointId> span(b.lines[m.line].points.begin() + m.begin,
                                b.lines[m.line].points.begin() + m.end + 1);
      if (span.front() != c.root) std::reverse(span.begin(), span.end());
      if (span != m.points)
        return fail("component " + std::to_string(ci) + " member is not rooted at its root");
    }
    const auto [sub, global] = component_bundle(b, c);
    const auto r = validate_ptb(sub);
    if (!r.ok) return fail("component " + std::to_string(ci) + " is not a tree bundle: " + r.message);
  }
  return rep;
}

struct GeneralResult {
  Simplification simplification;
  Decomposition decomposition;
};

/// Decompose, simplify every tree component independently and union the
/// results with D. Components are disjoint, so `jobs` threads may share them.
inline GeneralResult simplify_general(const Bundle& b, double delta, Metric metric,
                                      unsigned jobs = 1, DpOptions opts = {}) {
  GeneralResult res;
  res.decomposition = greedy_tbd(b);
  const auto& comps = res.decomposition.components;
  std::vector<std::vector<PointId>> kept(comps.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < comps.size(); i = next++) {
      try {
        const auto [sub, global] = component_bundle(b, comps[i]);
        const TreeGraph tree = build_tree_graph(sub);
        const ShortcutGraph g = build_tree_shortcuts(sub, tree, delta, metric);
        for (PointId v : ptbs_dp(tree, g, opts).kept) kept[i].push_back(global[v]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<PointId> all = res.decomposition.d_set;
  for (const auto& k : kept) all.insert(all.end(), k.begin(), k.end());
  res.simplification = make_simplification(b, std::move(all), metric);
  return res;
}

/// "D k ids..." then one "C root m line:begin-end ..." line per component.
inline std::string write_decomposition(const Decomposition& dec) {
  std::ostringstream os;
  os << "D " << dec.d_set.size();
  for (PointId v : dec.d_set) os << ' ' << v;
  os << '\n';
  for (const auto& c : dec.components) {
    os << "C " << c.root << ' ' << c.members.size();
    for (const auto& m : c.members) os << ' ' << m.line << ':' << m.begin << '-' << m.end;
    os << '\n';
  }
  return os.str();
}

}  // namespace pbs
