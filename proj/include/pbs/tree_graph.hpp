#pragma once

// Tree graph of a polyline tree bundle and the bundle-level validator.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pbs/geometry.hpp"

namespace pbs {

class NotATreeBundle : public Error {
public:
  using Error::Error;
};

/// A point reached from two different predecessors.
class PrefixViolation : public NotATreeBundle {
public:
  using NotATreeBundle::NotATreeBundle;
};

/// Union of the root-anchored directed paths of a tree bundle. Node ids are
/// bundle point ids; points not on any line are absent.
struct TreeGraph {
  PointId root = kNoPoint;
  std::vector<PointId> parent;
  std::vector<std::vector<PointId>> children;
  std::vector<char> present;
  std::vector<PointId> leaves;
  /// Line endpoints: the root, the leaves and ends of lines nested in others.
  std::vector<char> terminal;
  /// Global post-order. Sub(v) is the contiguous range ending at pos[v].
  std::vector<PointId> postorder;
  std::vector<std::uint32_t> pos;
  std::vector<std::uint32_t> subtree_size;
  std::vector<std::uint32_t> depth;

  std::size_t size() const { return postorder.size(); }
  bool contains(PointId v) const { return v < present.size() && present[v]; }
  bool is_leaf(PointId v) const { return children[v].empty(); }

  std::span<const PointId> subtree(PointId v) const {
    const std::size_t end = pos[v] + 1;
    return std::span<const PointId>(postorder).subspan(end - subtree_size[v], subtree_size[v]);
  }

  /// True iff a is a (non-strict) ancestor of d.
  bool is_ancestor(PointId a, PointId d) const {
    return pos[d] <= pos[a] && pos[d] + subtree_size[a] > pos[a];
  }
};

struct PtbReport {
  bool ok = true;
  std::string message;
  std::optional<std::pair<LineId, LineId>> offending;
};

namespace detail {

struct ParentScan {
  PtbReport report;
  std::vector<PointId> parent;
  std::vector<LineId> owner;
};

inline ParentScan scan_parents(const Bundle& b) {
  ParentScan s;
  s.parent.assign(b.n(), kNoPoint);
  s.owner.assign(b.n(), 0);
  std::vector<char> seen(b.n(), 0);
  auto fail = [&](std::string msg, LineId i, LineId j) {
    s.report.ok = false;
    s.report.message = std::move(msg);
    s.report.offending = std::make_pair(i, j);
  };
  if (b.lines.empty()) {
    s.report.ok = false;
    s.report.message = "bundle has no lines";
    return s;
  }
  const PointId root = b.lines[0].front();
  seen[root] = 1;
  for (LineId l = 0; l < b.ell(); ++l) {
    const auto& line = b.lines[l].points;
    if (line.front() != root) {
      fail("line " + std::to_string(l) + " does not start at the root of line 0", 0, l);
      return s;
    }
    for (std::size_t i = 1; i < line.size(); ++i) {
      const PointId v = line[i];
      const PointId p = line[i - 1];
      if (v == root) {
        fail("line " + std::to_string(l) + " revisits the root", 0, l);
        return s;
      }
      if (!seen[v]) {
        seen[v] = 1;
        s.parent[v] = p;
        s.owner[v] = l;
      } else if (s.parent[v] != p) {
        fail("point " + std::to_string(v) + " is reached from two different predecessors",
             s.owner[v], l);
        return s;
      }
    }
  }
  return s;
}

}  // namespace detail

/// Checks the tree-bundle property: a common root and pairwise intersections
/// that are exactly common prefixes.
inline PtbReport validate_ptb(const Bundle& b) {
  check_bundle(b);
  return detail::scan_parents(b).report;
}

inline TreeGraph build_tree_graph(const Bundle& b) {
  check_bundle(b);
  auto scan = detail::scan_parents(b);
  if (!scan.report.ok) {
    if (scan.report.message.find("predecessors") != std::string::npos)
      throw PrefixViolation(scan.report.message);
    throw NotATreeBundle(scan.report.message);
  }
  TreeGraph t;
  const std::size_t n = b.n();
  t.root = b.lines[0].front();
  t.parent = std::move(scan.parent);
  t.children.assign(n, {});
  t.present.assign(n, 0);
  t.pos.assign(n, 0);
  t.subtree_size.assign(n, 0);
  t.depth.assign(n, 0);
  t.present[t.root] = 1;
  t.terminal.assign(n, 0);
  for (const auto& line : b.lines) t.terminal[line.front()] = t.terminal[line.back()] = 1;
  // Children in order of first appearance.
  for (const auto& line : b.lines) {
    for (std::size_t i = 1; i < line.size(); ++i) {
      const PointId v = line[i];
      if (!t.present[v]) {
        t.present[v] = 1;
        t.children[line[i - 1]].push_back(v);
      }
    }
  }
  // Iterative DFS for post-order, depth and subtree sizes.
  std::vector<std::pair<PointId, std::size_t>> stack{{t.root, 0}};
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    if (next < t.children[v].size()) {
      const PointId c = t.children[v][next++];
      t.depth[c] = t.depth[v] + 1;
      stack.emplace_back(c, 0);
    } else {
      const PointId done = v;
      stack.pop_back();
      std::uint32_t sz = 1;
      for (PointId c : t.children[done]) sz += t.subtree_size[c];
      t.subtree_size[done] = sz;
      t.pos[done] = static_cast<std::uint32_t>(t.postorder.size());
      t.postorder.push_back(done);
      if (t.children[done].empty()) t.leaves.push_back(done);
    }
  }
  std::sort(t.leaves.begin(), t.leaves.end());
  return t;
}

}  // namespace pbs
