#pragma once

// Bundle text format, GTFS shapes ingestion, embedded graphs and the
// synthetic tree / general bundle generators.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <deque>
#include <istream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pbs/geometry.hpp"

namespace pbs {

/// Malformed input text; `line` is 1-based (0 when not tied to a line).
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

namespace detail {

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && p == end;
}

inline std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Non-blank, non-comment lines with their 1-based numbers.
inline std::vector<std::pair<std::size_t, std::string>> content_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    out.emplace_back(no, line);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------- bundle file

inline Bundle read_bundle(std::istream& in) {
  const auto lines = detail::content_lines(in);
  std::size_t at = 0;
  auto next = [&](const char* what) -> const std::pair<std::size_t, std::string>& {
    if (at == lines.size())
      throw ParseError(lines.empty() ? 0 : lines.back().first, std::string("missing ") + what);
    return lines[at++];
  };
  const auto& [hno, header] = next("header");
  const auto ht = detail::tokens(header);
  std::size_t n = 0, ell = 0;
  if (ht.size() != 2 || !detail::parse_number(ht[0], n) || !detail::parse_number(ht[1], ell))
    throw ParseError(hno, "header must be 'n l'");

  Bundle b;
  b.points.resize(n);
  std::vector<char> seen(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [no, text] = next("point line");
    const auto t = detail::tokens(text);
    std::size_t id = 0;
    Point p;
    if (t.size() != 3 || !detail::parse_number(t[0], id) || !detail::parse_number(t[1], p.x) ||
        !detail::parse_number(t[2], p.y))
      throw ParseError(no, "point line must be 'id x y'");
    if (id >= n) throw ParseError(no, "point id " + std::to_string(id) + " out of range");
    if (seen[id]) throw ParseError(no, "duplicate point id " + std::to_string(id));
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ParseError(no, "non-finite coordinate");
    seen[id] = 1;
    b.points[id] = p;
  }
  for (std::size_t l = 0; l < ell; ++l) {
    const auto& [no, text] = next("polyline line");
    const auto t = detail::tokens(text);
    std::size_t k = 0;
    if (t.empty() || !detail::parse_number(t[0], k) || t.size() != k + 1)
      throw ParseError(no, "polyline line must be 'k id_1 ... id_k'");
    if (k < 2) throw ParseError(no, "polyline needs at least two points");
    Polyline pl;
    for (std::size_t i = 1; i <= k; ++i) {
      PointId id = 0;
      if (!detail::parse_number(t[i], id)) throw ParseError(no, "bad point id");
      if (id >= n) throw ParseError(no, "point id " + std::to_string(id) + " out of range");
      if (std::find(pl.points.begin(), pl.points.end(), id) != pl.points.end())
        throw ParseError(no, "polyline repeats point " + std::to_string(id));
      pl.points.push_back(id);
    }
    b.lines.push_back(std::move(pl));
  }
  if (at != lines.size()) throw ParseError(lines[at].first, "trailing content");
  return b;
}

inline Bundle read_bundle(const std::string& text) {
  std::istringstream in(text);
  return read_bundle(in);
}

inline std::string write_bundle(const Bundle& b) {
  std::string out = std::to_string(b.n()) + ' ' + std::to_string(b.ell()) + '\n';
  for (std::size_t i = 0; i < b.n(); ++i)
    out += std::to_string(i) + ' ' + detail::format_real(b.points[i].x) + ' ' +
           detail::format_real(b.points[i].y) + '\n';
  for (const auto& line : b.lines) {
    out += std::to_string(line.size());
    for (PointId id : line.points) out += ' ' + std::to_string(id);
    out += '\n';
  }
  return out;
}

/// Kept-point file: "k" on the first line, then the k ids.
inline std::string write_kept(const std::vector<PointId>& kept) {
  std::string out = std::to_string(kept.size()) + '\n';
  for (std::size_t i = 0; i < kept.size(); ++i) out += (i ? " " : "") + std::to_string(kept[i]);
  if (!kept.empty()) out += '\n';
  return out;
}

inline std::vector<PointId> read_kept(std::istream& in) {
  const auto lines = detail::content_lines(in);
  std::vector<std::string_view> t;
  for (const auto& [no, text] : lines)
    for (auto tok : detail::tokens(text)) t.push_back(tok);
  std::size_t k = 0;
  if (t.empty() || !detail::parse_number(t[0], k))
    throw ParseError(lines.empty() ? 0 : lines.front().first, "kept file must start with a count");
  if (t.size() != k + 1) throw ParseError(0, "kept file lists " + std::to_string(t.size() - 1) +
                                                 " ids, header says " + std::to_string(k));
  std::vector<PointId> kept(k);
  for (std::size_t i = 0; i < k; ++i)
    if (!detail::parse_number(t[i + 1], kept[i])) throw ParseError(0, "bad point id in kept file");
  return kept;
}

// ----------------------------------------------------------------------- GTFS

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  for (auto& f : out) {
    const auto a = f.find_first_not_of(" \t");
    const auto z = f.find_last_not_of(" \t");
    f = a == std::string::npos ? std::string{} : f.substr(a, z - a + 1);
  }
  return out;
}

// First-seen canonical point within `radius`, via a uniform grid.
class PointSnapper {
public:
  explicit PointSnapper(double radius) : radius_(radius) {}

  PointId find(Point p) const {
    if (radius_ <= 0.0) {
      auto it = exact_.find(key(p));
      return it == exact_.end() ? kNoPoint : it->second;
    }
    const auto [cx, cy] = cell(p);
    PointId best = kNoPoint;
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid_.find({cx + dx, cy + dy});
        if (it == grid_.end()) continue;
        for (PointId id : it->second)
          if (distance(points_[id], p) <= radius_ && id < best) best = id;
      }
    return best;
  }

  PointId insert(Point p) {
    const auto id = static_cast<PointId>(points_.size());
    points_.push_back(p);
    if (radius_ <= 0.0)
      exact_.emplace(key(p), id);
    else
      grid_[cell(p)].push_back(id);
    return id;
  }

  void truncate(std::size_t size) {
    while (points_.size() > size) {
      const Point p = points_.back();
      if (radius_ <= 0.0)
        exact_.erase(key(p));
      else
        grid_[cell(p)].pop_back();
      points_.pop_back();
    }
  }

  const std::vector<Point>& points() const { return points_; }

private:
  static std::pair<std::uint64_t, std::uint64_t> key(Point p) {
    std::uint64_t a, b;
    std::memcpy(&a, &p.x, sizeof a);
    std::memcpy(&b, &p.y, sizeof b);
    return {a, b};
  }
  std::pair<std::int64_t, std::int64_t> cell(Point p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / radius_)),
            static_cast<std::int64_t>(std::floor(p.y / radius_))};
  }

  double radius_;
  std::vector<Point> points_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, PointId> exact_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<PointId>> grid_;
};

}  // namespace detail

struct GtfsResult {
  Bundle bundle;
  std::vector<std::string> shape_ids;  // one per line
  std::vector<std::string> warnings;
};

/// One polyline per shape_id (first-appearance order), x = lon, y = lat.
inline GtfsResult ingest_gtfs(std::istream& in, double snap_radius = 0.0) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty shapes file");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv(line);
  auto column = [&](const char* name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(1, std::string("missing column ") + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_id = column("shape_id"), c_lat = column("shape_pt_lat"),
                    c_lon = column("shape_pt_lon"), c_seq = column("shape_pt_sequence");
  const std::size_t need = std::max({c_id, c_lat, c_lon, c_seq}) + 1;

  struct Row {
    long long seq;
    Point p;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Row>> shapes;
  for (std::size_t no = 2; std::getline(in, line); ++no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto f = detail::split_csv(line);
    if (f.size() < need) throw ParseError(no, "too few columns");
    Row r;
    if (!detail::parse_number(std::string_view(f[c_lat]), r.p.y) ||
        !detail::parse_number(std::string_view(f[c_lon]), r.p.x) ||
        !detail::parse_number(std::string_view(f[c_seq]), r.seq))
      throw ParseError(no, "bad coordinate or sequence");
    auto [it, inserted] = shapes.try_emplace(f[c_id]);
    if (inserted) order.push_back(f[c_id]);
    it->second.push_back(r);
  }

  GtfsResult res;
  detail::PointSnapper snap(snap_radius);
  for (const auto& sid : order) {
    auto rows = shapes[sid];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.seq < b.seq; });
    const std::size_t mark = snap.points().size();
    Polyline pl;
    bool simple = true;
    for (const auto& r : rows) {
      PointId id = snap.find(r.p);
      if (id == kNoPoint) id = snap.insert(r.p);
      if (!pl.points.empty() && pl.points.back() == id) continue;
      if (std::find(pl.points.begin(), pl.points.end(), id) != pl.points.end()) {
        simple = false;
        break;
      }
      pl.points.push_back(id);
    }
    if (!simple || pl.points.size() < 2) {
      snap.truncate(mark);
      res.warnings.push_back("shape " + sid + (simple ? " has fewer than two distinct points"
                                                      : " is not simple") +
                             "; skipped");
      continue;
    }
    res.bundle.lines.push_back(std::move(pl));
    res.shape_ids.push_back(sid);
  }
  res.bundle.points = snap.points();
  return res;
}

inline GtfsResult ingest_gtfs(const std::string& text, double snap_radius = 0.0) {
  std::istringstream in(text);
  return ingest_gtfs(in, snap_radius);
}

/// shapes.txt for a bundle; shape ids are the line indices.
inline std::string write_gtfs_shapes(const Bundle& b) {
  std::string out = "shape_id,shape_pt_lat,shape_pt_lon,shape_pt_sequence\n";
  for (LineId l = 0; l < b.ell(); ++l)
    for (std::size_t i = 0; i < b.lines[l].size(); ++i) {
      const Point p = b.points[b.lines[l][i]];
      out += std::to_string(l) + ',' + detail::format_real(p.y) + ',' +
             detail::format_real(p.x) + ',' + std::to_string(i + 1) + '\n';
    }
  return out;
}

// ------------------------------------------------------------ embedded graphs

struct EmbeddedGraph {
  std::vector<Point> nodes;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  std::vector<std::vector<std::uint32_t>> adjacency() const {
    std::vector<std::vector<std::uint32_t>> adj(nodes.size());
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }
};

/// "nodes:" section of "id x y" lines followed by an "edges:" section of "u v".
inline EmbeddedGraph read_graph(std::istream& in) {
  enum { None, Nodes, Edges } section = None;
  EmbeddedGraph g;
  std::vector<char> seen;
  std::vector<std::pair<std::size_t, std::pair<std::uint32_t, std::uint32_t>>> edges;
  for (const auto& [no, text] : detail::content_lines(in)) {
    const auto t = detail::tokens(text);
    if (t.size() == 1 && t[0] == "nodes:") {
      section = Nodes;
      continue;
    }
    if (t.size() == 1 && t[0] == "edges:") {
      section = Edges;
      continue;
    }
    if (section == Nodes) {
      std::uint32_t id = 0;
      Point p;
      if (t.size() != 3 || !detail::parse_number(t[0], id) || !detail::parse_number(t[1], p.x) ||
          !detail::parse_number(t[2], p.y))
        throw ParseError(no, "node line must be 'id x y'");
      if (id >= g.nodes.size()) {
        g.nodes.resize(id + 1);
        seen.resize(id + 1, 0);
      }
      if (seen[id]) throw ParseError(no, "duplicate node id " + std::to_string(id));
      seen[id] = 1;
      g.nodes[id] = p;
    } else if (section == Edges) {
      std::uint32_t u = 0, v = 0;
      if (t.size() != 2 || !detail::parse_number(t[0], u) || !detail::parse_number(t[1], v))
        throw ParseError(no, "edge line must be 'u v'");
      edges.push_back({no, {u, v}});
    } else {
      throw ParseError(no, "expected 'nodes:' section");
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw ParseError(0, "node ids are not dense");
  for (const auto& [no, e] : edges) {
    if (e.first >= g.nodes.size() || e.second >= g.nodes.size())
      throw ParseError(no, "edge references unknown node");
    if (e.first == e.second) throw ParseError(no, "self-loop");
    g.edges.push_back(e);
  }
  return g;
}

inline std::string write_graph(const EmbeddedGraph& g) {
  std::string out = "nodes:\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    out += std::to_string(i) + ' ' + detail::format_real(g.nodes[i].x) + ' ' +
           detail::format_real(g.nodes[i].y) + '\n';
  out += "edges:\n";
  for (auto [u, v] : g.edges) out += std::to_string(u) + ' ' + std::to_string(v) + '\n';
  return out;
}

// ----------------------------------------------------------------- generators

/// mt19937_64 with hand-rolled draws so sequences do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % n;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

private:
  std::mt19937_64 engine_;
};

struct GridGraphParams {
  std::size_t rows = 20;
  std::size_t cols = 20;
  double spacing = 1.0;
  double jitter = 0.3;       // fraction of spacing
  double keep_extra = 0.5;   // probability of keeping a non-spanning-tree edge
  std::size_t subdivide = 0; // max extra points inserted per edge
};

/// Road-like embedded graph: a jittered grid thinned to a random spanning
/// tree plus a fraction of the remaining edges, optionally subdivided.
inline EmbeddedGraph grid_road_graph(const GridGraphParams& p, std::uint64_t seed) {
  if (p.rows == 0 || p.cols == 0) throw Error("grid must have at least one node");
  Rng rng(seed);
  EmbeddedGraph g;
  const double j = p.jitter * p.spacing;
  for (std::size_t r = 0; r < p.rows; ++r)
    for (std::size_t c = 0; c < p.cols; ++c)
      g.nodes.push_back({c * p.spacing + rng.uniform(-j, j), r * p.spacing + rng.uniform(-j, j)});
  std::vector<std::pair<std::uint32_t, std::uint32_t>> all;
  auto id = [&](std::size_t r, std::size_t c) { return static_cast<std::uint32_t>(r * p.cols + c); };
  for (std::size_t r = 0; r < p.rows; ++r)
    for (std::size_t c = 0; c < p.cols; ++c) {
      if (c + 1 < p.cols) all.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < p.rows) all.emplace_back(id(r, c), id(r + 1, c));
    }
  rng.shuffle(all);
  std::vector<std::uint32_t> parent(g.nodes.size());
  for (std::uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::pair<std::uint32_t, std::uint32_t>> kept;
  for (auto e : all) {
    const auto a = find(e.first), b = find(e.second);
    if (a != b) {
      parent[a] = b;
      kept.push_back(e);
    } else if (rng.uniform() < p.keep_extra) {
      kept.push_back(e);
    }
  }
  std::sort(kept.begin(), kept.end());
  for (auto [u, v] : kept) {
    const std::size_t extra = p.subdivide ? rng.below(p.subdivide + 1) : 0;
    std::uint32_t prev = u;
    const Point a = g.nodes[u], b = g.nodes[v];
    const Point normal{-(b.y - a.y), b.x - a.x};
    for (std::size_t k = 1; k <= extra; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(extra + 1);
      const double wobble = rng.uniform(-0.05, 0.05);
      g.nodes.push_back(a + t * (b - a) + wobble * normal);
      const auto w = static_cast<std::uint32_t>(g.nodes.size() - 1);
      g.edges.emplace_back(prev, w);
      prev = w;
    }
    g.edges.emplace_back(prev, v);
  }
  return g;
}

namespace detail {

// BFS tree over the first `size` nodes reached from root; neighbor order is
// shuffled by the seed. Returns (nodes in BFS order, parent per node).
inline std::pair<std::vector<std::uint32_t>, std::unordered_map<std::uint32_t, std::uint32_t>>
bfs_tree(const EmbeddedGraph& g, std::uint32_t root, std::size_t size, Rng& rng) {
  if (root >= g.nodes.size()) throw Error("root node out of range");
  if (size < 2) throw Error("tree bundle size must be at least 2");
  auto adj = g.adjacency();
  std::vector<std::uint32_t> order{root};
  std::unordered_map<std::uint32_t, std::uint32_t> parent{{root, root}};
  std::deque<std::uint32_t> queue{root};
  while (!queue.empty() && order.size() < size) {
    const auto u = queue.front();
    queue.pop_front();
    auto nb = adj[u];
    rng.shuffle(nb);
    for (auto v : nb) {
      if (order.size() == size) break;
      if (parent.contains(v)) continue;
      parent.emplace(v, u);
      order.push_back(v);
      queue.push_back(v);
    }
  }
  if (order.size() < size)
    throw Error("component of root has " + std::to_string(order.size()) + " nodes, fewer than " +
                std::to_string(size));
  return {std::move(order), std::move(parent)};
}

// Root-to-leaf node paths of a BFS tree, leaves in BFS order.
inline std::vector<std::vector<std::uint32_t>> tree_paths(
    const std::vector<std::uint32_t>& order,
    const std::unordered_map<std::uint32_t, std::uint32_t>& parent) {
  std::unordered_map<std::uint32_t, std::size_t> children;
  for (auto v : order)
    if (parent.at(v) != v) ++children[parent.at(v)];
  std::vector<std::vector<std::uint32_t>> paths;
  for (auto v : order) {
    if (children.contains(v) || parent.at(v) == v) continue;
    std::vector<std::uint32_t> path{v};
    while (parent.at(path.back()) != path.back()) path.push_back(parent.at(path.back()));
    std::reverse(path.begin(), path.end());
    paths.push_back(std::move(path));
  }
  return paths;
}

}  // namespace detail

/// Tree bundle: BFS from root over `size` graph nodes, one root-to-leaf
/// polyline per BFS-tree leaf. Points are numbered in BFS order.
inline Bundle gen_tree_bundle(const EmbeddedGraph& g, std::uint32_t root, std::size_t size,
                              std::uint64_t seed) {
  Rng rng(seed);
  const auto [order, parent] = detail::bfs_tree(g, root, size, rng);
  std::unordered_map<std::uint32_t, PointId> local;
  Bundle b;
  for (auto v : order) {
    local.emplace(v, static_cast<PointId>(b.points.size()));
    b.points.push_back(g.nodes[v]);
  }
  for (const auto& path : detail::tree_paths(order, parent)) {
    Polyline pl;
    for (auto v : path) pl.points.push_back(local.at(v));
    b.lines.push_back(std::move(pl));
  }
  return b;
}

/// Union of several tree bundles over the same graph; graph nodes used by
/// more than one tree appear once in the point table.
inline Bundle gen_general_bundle(const EmbeddedGraph& g, const std::vector<std::uint32_t>& roots,
                                 const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  if (roots.size() != sizes.size()) throw Error("roots and sizes differ in length");
  Rng rng(seed);
  std::unordered_map<std::uint32_t, PointId> local;
  Bundle b;
  auto id = [&](std::uint32_t v) {
    auto [it, inserted] = local.emplace(v, static_cast<PointId>(b.points.size()));
    if (inserted) b.points.push_back(g.nodes[v]);
    return it->second;
  };
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto [order, parent] = detail::bfs_tree(g, roots[i], sizes[i], rng);
    for (auto v : order) id(v);
    for (const auto& path : detail::tree_paths(order, parent)) {
      Polyline pl;
      for (auto v : path) pl.points.push_back(id(v));
      b.lines.push_back(std::move(pl));
    }
  }
  return b;
}

}  // namespace pbs
