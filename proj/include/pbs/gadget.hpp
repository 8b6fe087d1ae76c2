#pragma once

// Planar hardness instances built from a graph for minimum independent
// dominating set: one vertical polyline per vertex, one horizontal polyline
// per edge and per closed neighborhood, and crossing points where a
// horizontal passes an unrelated vertex polyline. The generator checks its
// own output and refuses to return an instance that does not behave.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pbs/shortcut_graph.hpp"
#include "pbs/verify.hpp"

namespace pbs {

class GadgetError : public Error {
public:
  using Error::Error;
};

struct MidsGraph {
  std::size_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  double density() const { return n ? static_cast<double>(edges.size()) / n : 0.0; }

  /// N[v] in increasing vertex order.
  std::vector<std::vector<std::uint32_t>> closed_neighborhoods() const {
    std::vector<std::vector<std::uint32_t>> nb(n);
    for (std::uint32_t v = 0; v < n; ++v) nb[v].push_back(v);
    for (auto [u, v] : edges) {
      nb[u].push_back(v);
      nb[v].push_back(u);
    }
    for (auto& x : nb) std::sort(x.begin(), x.end());
    return nb;
  }

  bool independent(const std::vector<std::uint32_t>& s) const {
    std::vector<char> in(n, 0);
    for (auto v : s) in[v] = 1;
    return std::none_of(edges.begin(), edges.end(),
                        [&](auto e) { return in[e.first] && in[e.second]; });
  }

  bool dominating(const std::vector<std::uint32_t>& s) const {
    std::vector<char> in(n, 0);
    for (auto v : s) in[v] = 1;
    for (const auto& nb : closed_neighborhoods())
      if (std::none_of(nb.begin(), nb.end(), [&](auto u) { return in[u]; })) return false;
    return true;
  }
};

/// Throws GadgetError unless g is a simple graph with at least two vertices.
inline void check_mids_graph(const MidsGraph& g) {
  if (g.n < 2) throw GadgetError("graph needs at least two vertices");
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (auto [u, v] : g.edges) {
    if (u >= g.n || v >= g.n) throw GadgetError("edge endpoint out of range");
    if (u == v) throw GadgetError("self-loop on vertex " + std::to_string(u));
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
      throw GadgetError("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
  }
}

struct GadgetParams {
  double delta = 1.0;
  double gamma = 0.0;      // 0 selects delta / 10
  double x_spacing = 0.0;  // 0 selects the smallest comfortable spacing
  double t = 0.0;          // set by the generator (widest neighborhood span)
  double eta = 0.0;        // set by the generator
};

enum class GadgetKind { Vertex, Edge, Neighborhood };

inline const char* to_string(GadgetKind k) {
  switch (k) {
    case GadgetKind::Vertex: return "vertex";
    case GadgetKind::Edge: return "edge";
    case GadgetKind::Neighborhood: return "neighborhood";
  }
  return "?";
}

struct Gadget {
  GadgetKind kind = GadgetKind::Vertex;
  std::uint32_t owner = 0;  // vertex id, or edge index for edge gadgets
  LineId line = 0;
  PointId first = kNoPoint;  // T / F
  PointId last = kNoPoint;   // B / G
  std::vector<std::uint32_t> members;  // edge: {u, v}; neighborhood: N[v]
  std::vector<PointId> shared;         // vertex: slot per row; others: slot per member
  std::vector<PointId> zigzag;
  std::vector<std::pair<PointId, PointId>> intended;  // shortcuts the reduction relies on
};

struct Crossing {
  PointId p = kNoPoint;
  PointId v_star = kNoPoint;  // skip point on the vertex polyline
  PointId h_star = kNoPoint;  // skip point on the horizontal polyline
  LineId vertex_line = 0;
  LineId horizontal_line = 0;
};

struct GadgetMeta {
  GadgetParams params;
  std::vector<Gadget> gadgets;  // indexed by line id
  std::vector<Crossing> crossings;
  std::vector<char> is_crossing;  // per point
};

struct GadgetInstance {
  Bundle bundle;
  GadgetMeta meta;
};

namespace detail {

struct GadgetLayout {
  double delta, gamma, a, hv, row_gap, H, zig_step, zig_len, margin, xs;
  std::size_t zig_points;

  double column(std::int64_t c) const { return static_cast<double>(c) * xs; }
  double row(std::size_t r) const { return -row_gap * static_cast<double>(r); }
  double gap_lo(std::int64_t g) const { return column(g) + a + margin; }
  double gap_hi(std::int64_t g) const { return column(g + 1) - a - margin; }
};

inline GadgetLayout make_layout(const MidsGraph& g, const GadgetParams& p) {
  GadgetLayout L{};
  if (!(p.delta > 0.0) || !std::isfinite(p.delta)) throw GadgetError("delta must be positive");
  L.delta = p.delta;
  L.gamma = p.gamma == 0.0 ? p.delta / 10.0 : p.gamma;
  if (!(L.gamma > 0.0 && L.gamma < p.delta / 5.0))
    throw GadgetError("gamma must lie strictly between 0 and delta/5");
  L.a = 0.9 * L.delta;
  L.hv = 1.5 * L.delta;
  L.row_gap = 6.0 * L.delta;
  L.H = 0.7 * L.delta;
  L.zig_step = 3.0 * L.delta;
  L.zig_points = 2 * g.n * g.n + 1;
  L.zig_len = L.zig_step * static_cast<double>(L.zig_points - 1);
  L.margin = 3.0 * L.delta;
  const double min_xs = L.zig_len + 2.0 * (L.a + L.margin);
  L.xs = p.x_spacing == 0.0 ? 3.0 * L.zig_len + 2.0 * (L.a + L.margin) : p.x_spacing;
  if (L.xs < min_xs)
    throw GadgetError("x_spacing " + std::to_string(L.xs) + " leaves no room for a zigzag (need " +
                      std::to_string(min_xs) + ")");
  return L;
}

struct CrossingProto {
  PointId v_star, h_star;
  LineId vertex_line, horizontal_line;
};

struct PrePlanar {
  Bundle bundle;
  GadgetMeta meta;
  std::vector<CrossingProto> crossings;
  double t = 0.0;
};

// Everything except the crossing points; h* sits rho left of the slot.
inline PrePlanar layout_instance(const MidsGraph& g, const GadgetLayout& L, double rho) {
  PrePlanar out;
  Bundle& b = out.bundle;
  auto add = [&](double x, double y) {
    b.points.push_back({x, y});
    return static_cast<PointId>(b.points.size() - 1);
  };
  const std::size_t m = g.edges.size();
  const std::size_t rows = m + g.n;
  const auto nb = g.closed_neighborhoods();

  // vertex gadgets
  std::vector<std::vector<PointId>> slot(g.n, std::vector<PointId>(rows));
  for (std::uint32_t w = 0; w < g.n; ++w) {
    const double X = L.column(w);
    Gadget gd;
    gd.kind = GadgetKind::Vertex;
    gd.owner = w;
    gd.line = static_cast<LineId>(b.lines.size());
    Polyline pl;
    pl.points.push_back(gd.first = add(X, L.row(0) + 2.0 * L.hv));
    for (std::size_t r = 0; r < rows; ++r) {
      const double y = L.row(r);
      pl.points.push_back(add(X + L.a, y + L.hv));
      pl.points.push_back(slot[w][r] = add(X - L.a, y));
      pl.points.push_back(add(X + L.a, y - L.hv));
      if (r + 1 < rows) pl.points.push_back(add(X - L.a, y - 2.0 * L.hv));
    }
    pl.points.push_back(gd.last = add(X, L.row(rows - 1) - 2.0 * L.hv));
    gd.shared = slot[w];
    gd.intended.emplace_back(gd.first, gd.last);
    b.lines.push_back(std::move(pl));
    out.meta.gadgets.push_back(std::move(gd));
  }

  auto zigzag = [&](Polyline& pl, Gadget& gd, double start, double y, double up, double lo) {
    for (std::size_t k = 0; k < L.zig_points; ++k) {
      const PointId id =
          add(start + L.zig_step * static_cast<double>(k), y + (k % 2 == 0 ? up : lo));
      pl.points.push_back(id);
      gd.zigzag.push_back(id);
    }
  };
  auto crossing = [&](Polyline& pl, std::uint32_t w, std::size_t r, LineId hline) {
    const PointId h = add(L.column(w) - L.a - rho, L.row(r));
    pl.points.push_back(h);
    out.crossings.push_back({slot[w][r], h, static_cast<LineId>(w), hline});
  };

  // edge gadgets
  for (std::size_t e = 0; e < m; ++e) {
    const auto u = std::min(g.edges[e].first, g.edges[e].second);
    const auto v = std::max(g.edges[e].first, g.edges[e].second);
    const std::size_t r = e;
    const double y = L.row(r);
    const double x_su = L.column(u) - L.a, x_sv = L.column(v) - L.a;
    const double A = L.xs / 4.0;
    const double x_F = x_su - A, x_G = x_sv + A;
    const double mid = 0.5 * (x_su + x_sv);
    std::int64_t best_gap = u;
    double best_center = 0.0, best_dist = std::numeric_limits<double>::infinity();
    for (std::int64_t gp = u; gp < v; ++gp) {
      const double c =
          std::clamp(mid, L.gap_lo(gp) + L.zig_len / 2.0, L.gap_hi(gp) - L.zig_len / 2.0);
      if (std::abs(c - mid) < best_dist) {
        best_dist = std::abs(c - mid);
        best_center = c;
        best_gap = gp;
      }
    }
    const double start = best_center - L.zig_len / 2.0, end = best_center + L.zig_len / 2.0;
    const double l1 = L.H * (x_sv - end) / (x_sv - x_F);
    const double l2 = L.H * (start - x_su) / (x_G - x_su);
    const double up = std::min(l1, l2) + L.delta - L.gamma;
    const double lo = L.H - L.delta + L.gamma;

    Gadget gd;
    gd.kind = GadgetKind::Edge;
    gd.owner = static_cast<std::uint32_t>(e);
    gd.line = static_cast<LineId>(b.lines.size());
    gd.members = {u, v};
    Polyline pl;
    pl.points.push_back(gd.first = add(x_F, y + L.H));
    pl.points.push_back(slot[u][r]);
    for (std::uint32_t c = u + 1; c <= v; ++c) {
      if (static_cast<std::int64_t>(c) - 1 == best_gap) zigzag(pl, gd, start, y, up, lo);
      if (c < v) crossing(pl, c, r, gd.line);
    }
    pl.points.push_back(slot[v][r]);
    pl.points.push_back(gd.last = add(x_G, y + L.H));
    gd.shared = {slot[u][r], slot[v][r]};
    gd.intended = {{gd.first, slot[v][r]}, {slot[u][r], gd.last}, {gd.first, gd.last}};
    b.lines.push_back(std::move(pl));
    out.meta.gadgets.push_back(std::move(gd));
  }

  // neighborhood gadgets
  const double up = 0.85 * L.delta, lo = -0.45 * L.delta, end_h = 1.2 * L.delta;
  auto centered = [&](std::int64_t gp) {
    return 0.5 * (L.gap_lo(gp) + L.gap_hi(gp)) - L.zig_len / 2.0;
  };
  for (std::uint32_t v = 0; v < g.n; ++v) {
    const std::size_t r = m + v;
    const double y = L.row(r);
    Gadget gd;
    gd.kind = GadgetKind::Neighborhood;
    gd.owner = v;
    gd.line = static_cast<LineId>(b.lines.size());
    gd.members = nb[v];
    Polyline pl;
    pl.points.push_back(gd.first = add(0.0, 0.0));  // placed below
    const double s0 = centered(-1);
    zigzag(pl, gd, s0, y, up, lo);
    for (std::uint32_t c = 0; c < g.n; ++c) {
      if (std::binary_search(nb[v].begin(), nb[v].end(), c)) {
        pl.points.push_back(slot[c][r]);
        gd.shared.push_back(slot[c][r]);
        zigzag(pl, gd, centered(c), y, up, lo);
      } else {
        crossing(pl, c, r, gd.line);
      }
    }
    double e = s0;
    for (std::size_t i = 1; i < pl.points.size(); ++i) e = std::max(e, b.points[pl.points[i]].x);
    const double t = e - s0;
    out.t = std::max(out.t, t);
    b.points[gd.first] = {s0 - 3.0 * t, y + end_h};
    pl.points.push_back(gd.last = add(e + 3.0 * t, y + end_h));
    for (PointId s : gd.shared) {
      gd.intended.emplace_back(gd.first, s);
      gd.intended.emplace_back(s, gd.last);
    }
    for (std::size_t i = 0; i < gd.shared.size(); ++i)
      for (std::size_t j = i + 1; j < gd.shared.size(); ++j)
        gd.intended.emplace_back(gd.shared[i], gd.shared[j]);
    b.lines.push_back(std::move(pl));
    out.meta.gadgets.push_back(std::move(gd));
  }
  return out;
}

// Smallest amount by which any vertex of a polyline exceeds delta from a
// segment joining two other vertices of the same polyline around it.
inline double compute_eta(const Bundle& b, double delta) {
  double eta = std::numeric_limits<double>::infinity();
  for (LineId l = 0; l < b.ell(); ++l) {
    const auto pts = b.line_points(l);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 2; j < pts.size(); ++j)
        for (std::size_t k = i + 1; k < j; ++k) {
          const double d = point_segment_distance(pts[k], pts[i], pts[j]);
          if (d > delta) eta = std::min(eta, d - delta);
        }
  }
  return std::isfinite(eta) ? eta : delta;
}

inline int orientation(Point a, Point b, Point c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

inline bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

inline bool segments_touch(Point a, Point b, Point c, Point d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  return (o1 == 0 && on_segment(c, a, b)) || (o2 == 0 && on_segment(d, a, b)) ||
         (o3 == 0 && on_segment(a, c, d)) || (o4 == 0 && on_segment(b, c, d));
}

}  // namespace detail

/// Whether two bundle segments meet anywhere other than a shared endpoint.
inline bool segments_conflict(const Bundle& b, std::pair<PointId, PointId> s,
                              std::pair<PointId, PointId> t) {
  const auto [a, c] = s;
  const auto [d, e] = t;
  const Point A = b.points[a], C = b.points[c], D = b.points[d], E = b.points[e];
  PointId shared = kNoPoint, x = kNoPoint, y = kNoPoint;
  if (a == d) shared = a, x = c, y = e;
  if (a == e) shared = a, x = c, y = d;
  if (c == d) shared = c, x = a, y = e;
  if (c == e) shared = c, x = a, y = d;
  if (shared != kNoPoint) {
    if ((a == d && c == e) || (a == e && c == d)) return false;  // same segment
    const Point S = b.points[shared], X = b.points[x], Y = b.points[y];
    // Only collinear overlap conflicts when an endpoint is shared.
    return detail::orientation(S, X, Y) == 0 && dot(X - S, Y - S) > 0.0;
  }
  return detail::segments_touch(A, C, D, E);
}

/// First pair of conflicting segments, if any (quadratic scan).
inline std::optional<std::pair<std::pair<PointId, PointId>, std::pair<PointId, PointId>>>
find_planarity_violation(const Bundle& b) {
  std::set<std::pair<PointId, PointId>> unique;
  for (const auto& line : b.lines)
    for (std::size_t i = 0; i + 1 < line.size(); ++i)
      unique.insert({std::min(line[i], line[i + 1]), std::max(line[i], line[i + 1])});
  const std::vector<std::pair<PointId, PointId>> segs(unique.begin(), unique.end());
  for (std::size_t i = 0; i < segs.size(); ++i)
    for (std::size_t j = i + 1; j < segs.size(); ++j)
      if (segments_conflict(b, segs[i], segs[j])) return std::make_pair(segs[i], segs[j]);
  return std::nullopt;
}

/// max(1, |E| / n) * 30 * n^3.
inline double gadget_point_bound(const MidsGraph& g) {
  const double c = std::max(1.0, g.density());
  const double n = static_cast<double>(g.n);
  return 30.0 * c * n * n * n;
}

struct GadgetCheck {
  bool ok = true;
  bool planar = true;
  bool point_bound = true;
  bool vertex_single_shortcut = true;
  bool intended_shortcuts = true;
  bool no_new_shortcuts = true;
  std::string message;
};

/// All structural properties of a generated instance, measured from scratch.
inline GadgetCheck check_gadget_instance(const MidsGraph& g, const GadgetInstance& inst,
                                         Metric metric = Metric::Frechet) {
  GadgetCheck rep;
  const Bundle& b = inst.bundle;
  const auto& meta = inst.meta;
  auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    rep.ok = false;
    if (rep.message.empty()) rep.message = std::move(msg);
  };

  if (auto v = find_planarity_violation(b))
    fail(rep.planar, "segments " + std::to_string(v->first.first) + "-" +
                         std::to_string(v->first.second) + " and " +
                         std::to_string(v->second.first) + "-" +
                         std::to_string(v->second.second) + " intersect");
  if (static_cast<double>(b.n()) > gadget_point_bound(g))
    fail(rep.point_bound, std::to_string(b.n()) + " points exceed the bound " +
                              std::to_string(gadget_point_bound(g)));

  const ShortcutGraph sg = build_naive(b, meta.params.delta, metric);

  for (const auto& gd : meta.gadgets) {
    const std::string name = std::string(to_string(gd.kind)) + " gadget " + std::to_string(gd.owner);
    for (auto [x, y] : gd.intended)
      if (!sg.has_edge(x, y))
        fail(rep.intended_shortcuts,
             name + " lacks shortcut " + std::to_string(x) + "-" + std::to_string(y));
    if (gd.kind == GadgetKind::Edge && sg.has_edge(gd.shared[0], gd.shared[1]))
      fail(rep.intended_shortcuts, name + " allows skipping its zigzag between both slots");
    if (gd.kind == GadgetKind::Neighborhood && sg.has_edge(gd.first, gd.last))
      fail(rep.intended_shortcuts, name + " can be skipped without any slot");
    if (gd.kind != GadgetKind::Vertex) continue;
    // A crossing point shares its unit with the slot it was placed next to;
    // a shortcut counts when it skips at least one whole unit.
    const auto& ids = b.lines[gd.line].points;
    std::vector<std::size_t> unit(ids.size(), 0);
    for (std::size_t i = 1; i < ids.size(); ++i)
      unit[i] = unit[i - 1] + (meta.is_crossing[ids[i]] ? 0 : 1);
    std::size_t count = 0;
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        if (unit[j] >= unit[i] + 2 && sg.has_edge(ids[i], ids[j])) {
          ++count;
          if (ids[i] != gd.first || ids[j] != gd.last)
            fail(rep.vertex_single_shortcut, name + " has extra shortcut " +
                                                 std::to_string(ids[i]) + "-" +
                                                 std::to_string(ids[j]));
        }
    if (count != 1) fail(rep.vertex_single_shortcut, name + " does not have exactly one shortcut");
  }

  for (const auto& c : meta.crossings) {
    std::vector<PointId> allowed;
    std::set_union(sg.adjacency[c.v_star].begin(), sg.adjacency[c.v_star].end(),
                   sg.adjacency[c.h_star].begin(), sg.adjacency[c.h_star].end(),
                   std::back_inserter(allowed));
    for (PointId w : sg.adjacency[c.p]) {
      if (w == c.v_star || w == c.h_star) continue;
      if (!std::binary_search(allowed.begin(), allowed.end(), w))
        fail(rep.no_new_shortcuts, "crossing point " + std::to_string(c.p) +
                                       " gains shortcut to " + std::to_string(w));
    }
  }
  return rep;
}

/// Build and self-check a gadget instance. Throws GadgetError with the first
/// failing property.
inline GadgetInstance gen_gadget_instance(const MidsGraph& g, GadgetParams params = {},
                                          Metric metric = Metric::Frechet) {
  check_mids_graph(g);
  const auto L = detail::make_layout(g, params);
  double rho = 0.5 * L.delta;
  detail::PrePlanar pre;
  double eta = 0.0;
  for (int iter = 0;; ++iter) {
    pre = detail::layout_instance(g, L, rho);
    eta = detail::compute_eta(pre.bundle, L.delta);
    if (rho < 0.4 * eta) break;
    if (iter == 32) throw GadgetError("crossing offset did not settle below eta");
    rho = 0.3 * eta;
  }

  GadgetInstance inst;
  inst.bundle = std::move(pre.bundle);
  inst.meta = std::move(pre.meta);
  inst.meta.params = params;
  inst.meta.params.gamma = L.gamma;
  inst.meta.params.x_spacing = L.xs;
  inst.meta.params.t = pre.t;
  inst.meta.params.eta = eta;
  auto& b = inst.bundle;
  for (const auto& c : pre.crossings) {
    auto& vline = b.lines[c.vertex_line].points;
    auto vit = std::find(vline.begin(), vline.end(), c.v_star);
    const Point s = b.points[c.v_star], next = b.points[*(vit + 1)];
    const Point dir = (1.0 / distance(s, next)) * (next - s);
    b.points.push_back(s + (0.5 * eta) * dir);
    const auto p = static_cast<PointId>(b.points.size() - 1);
    vline.insert(vit + 1, p);
    auto& hline = b.lines[c.horizontal_line].points;
    hline.insert(std::find(hline.begin(), hline.end(), c.h_star) + 1, p);
    inst.meta.crossings.push_back({p, c.v_star, c.h_star, c.vertex_line, c.horizontal_line});
  }
  inst.meta.is_crossing.assign(b.n(), 0);
  for (const auto& c : inst.meta.crossings) inst.meta.is_crossing[c.p] = 1;

  check_bundle(b);
  const auto rep = check_gadget_instance(g, inst, metric);
  if (!rep.ok) throw GadgetError("gadget self-check failed: " + rep.message);
  return inst;
}

/// Kept set the reduction associates with a vertex set: vertex gadgets of
/// chosen vertices keep all their own points, the others keep only their
/// ends; horizontal gadgets take their long skips. Without force_skips a
/// gadget whose long skip is unavailable keeps its zigzags instead.
inline std::vector<PointId> intended_solution(const MidsGraph& g,
                                              const std::vector<std::uint32_t>& mids,
                                              const GadgetInstance& inst,
                                              bool force_skips = false) {
  std::vector<char> in(g.n, 0);
  for (auto v : mids) {
    if (v >= g.n) throw GadgetError("vertex " + std::to_string(v) + " out of range");
    in[v] = 1;
  }
  const auto& b = inst.bundle;
  const auto& meta = inst.meta;
  std::vector<PointId> kept;
  auto keep_free_points = [&](const Gadget& gd) {
    for (PointId id : b.lines[gd.line].points)
      if (!meta.is_crossing[id] &&
          std::find(gd.shared.begin(), gd.shared.end(), id) == gd.shared.end())
        kept.push_back(id);
  };
  for (const auto& gd : meta.gadgets) {
    kept.push_back(gd.first);
    kept.push_back(gd.last);
    switch (gd.kind) {
      case GadgetKind::Vertex:
        if (in[gd.owner])
          for (PointId id : b.lines[gd.line].points)
            if (!meta.is_crossing[id]) kept.push_back(id);
        break;
      case GadgetKind::Edge:
        if (!force_skips && in[gd.members[0]] && in[gd.members[1]]) keep_free_points(gd);
        break;
      case GadgetKind::Neighborhood:
        if (!force_skips &&
            std::none_of(gd.members.begin(), gd.members.end(), [&](auto u) { return in[u]; }))
          keep_free_points(gd);
        break;
    }
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  return kept;
}

}  // namespace pbs
