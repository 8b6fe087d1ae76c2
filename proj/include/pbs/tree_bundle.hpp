#pragma once

// Exact simplification of polyline tree bundles: a dynamic program over the
// tree graph that, for every node v, picks the cheapest set of cover nodes
// reachable from v by a single shortcut.

#include <algorithm>
#include <limits>
#include <vector>

#include "pbs/shortcut_graph.hpp"
#include "pbs/tree_graph.hpp"
#include "pbs/verify.hpp"

namespace pbs {

/// The shortcut graph lacks a tree edge, so some subtree has no finite cover.
class InconsistentShortcuts : public Error {
public:
  using Error::Error;
};

struct DpOptions {
  /// Only evaluate helping values on paths from v to its shortcut endpoints.
  bool prune = true;
};

struct DpState {
  std::vector<std::uint32_t> s;                // optimal |S| of Sub(v) with v kept
  std::vector<std::vector<PointId>> covers;    // chosen cover nodes of v
};

struct DpSolution {
  std::vector<PointId> kept;  // sorted
  DpState state;
  std::size_t size() const { return kept.size(); }
};

namespace detail {

enum class HChoice : std::uint8_t { None, Shortcut, Children };

class TreeDp {
public:
  TreeDp(const TreeGraph& tree, const ShortcutGraph& shortcuts, DpOptions opts)
      : tree_(tree), g_(shortcuts), opts_(opts) {
    const std::size_t n = tree.present.size();
    inf_ = static_cast<std::uint32_t>(n + 1);
    h_.assign(n, inf_);
    choice_.assign(n, HChoice::None);
    stamp_.assign(n, 0);
    marked_.assign(n, 0);
    state_.s.assign(n, 0);
    state_.covers.assign(n, {});
  }

  DpState run() {
    for (PointId v : tree_.postorder) {
      if (tree_.is_leaf(v)) {
        state_.s[v] = 1;
        continue;
      }
      ++round_;
      for (PointId w : g_.adjacency[v]) stamp_[w] = round_;
      if (opts_.prune)
        evaluate_pruned(v);
      else
        evaluate_full(v);
      std::uint32_t sum = 0;
      for (PointId c : tree_.children[v]) sum = add(sum, h_[c]);
      if (sum >= inf_)
        throw InconsistentShortcuts("node " + std::to_string(v) + " has no finite cover");
      state_.s[v] = sum + 1;
      collect_covers(v);
    }
    return std::move(state_);
  }

private:
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    return a >= inf_ || b >= inf_ || a + b >= inf_ ? inf_ : a + b;
  }

  bool is_shortcut_end(PointId w) const { return stamp_[w] == round_; }

  // Helping value of w from its shortcut initialization and its children.
  // Ties prefer the shortcut choice.
  void relax(PointId w, bool children_available) {
    if (is_shortcut_end(w)) {
      h_[w] = state_.s[w];
      choice_[w] = HChoice::Shortcut;
    } else {
      h_[w] = inf_;
      choice_[w] = HChoice::None;
    }
    if (tree_.terminal[w] || !children_available) return;
    std::uint32_t sum = 0;
    for (PointId c : tree_.children[w]) sum = add(sum, h_[c]);
    if (sum < h_[w]) {
      h_[w] = sum;
      choice_[w] = HChoice::Children;
    }
  }

  void evaluate_full(PointId v) {
    const auto sub = tree_.subtree(v);
    for (std::size_t i = 0; i + 1 < sub.size(); ++i) relax(sub[i], true);
  }

  void evaluate_pruned(PointId v) {
    // Mark reverse paths from every shortcut endpoint up to v.
    marked_[v] = round_;
    for (PointId w : g_.adjacency[v]) {
      if (!tree_.is_ancestor(v, w) || w == v) continue;
      for (PointId x = w; marked_[x] != round_; x = tree_.parent[x]) marked_[x] = round_;
    }
    // Post-order over the marked part of Sub(v), excluding v.
    order_.clear();
    dfs_.assign(1, {v, 0});
    while (!dfs_.empty()) {
      auto& [u, next] = dfs_.back();
      const auto& ch = tree_.children[u];
      while (next < ch.size() && marked_[ch[next]] != round_) ++next;
      if (next < ch.size()) {
        const PointId c = ch[next++];
        dfs_.emplace_back(c, 0);
      } else {
        if (u != v) order_.push_back(u);
        dfs_.pop_back();
      }
    }
    for (PointId w : order_) {
      bool all_marked = true;
      for (PointId c : tree_.children[w]) all_marked = all_marked && marked_[c] == round_;
      relax(w, all_marked);
    }
    // Unmarked children of v count as infinite.
    for (PointId c : tree_.children[v])
      if (marked_[c] != round_) {
        h_[c] = inf_;
        choice_[c] = HChoice::None;
      }
  }

  void collect_covers(PointId v) {
    auto& covers = state_.covers[v];
    std::vector<PointId> stack(tree_.children[v].rbegin(), tree_.children[v].rend());
    while (!stack.empty()) {
      const PointId w = stack.back();
      stack.pop_back();
      if (choice_[w] == HChoice::Shortcut) {
        covers.push_back(w);
      } else {
        const auto& ch = tree_.children[w];
        stack.insert(stack.end(), ch.rbegin(), ch.rend());
      }
    }
  }

  const TreeGraph& tree_;
  const ShortcutGraph& g_;
  DpOptions opts_;
  std::uint32_t inf_ = 0;
  std::uint32_t round_ = 0;
  std::vector<std::uint32_t> h_;
  std::vector<HChoice> choice_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> marked_;
  std::vector<PointId> order_;
  std::vector<std::pair<PointId, std::size_t>> dfs_;
  DpState state_;
};

}  // namespace detail

/// Minimum-size S containing every line endpoint such that every
/// root-to-leaf path is covered by chained shortcuts. O(n^2) given G_s.
inline DpSolution ptbs_dp(const TreeGraph& tree, const ShortcutGraph& shortcuts,
                          DpOptions opts = {}) {
  if (shortcuts.adjacency.size() != tree.present.size())
    throw InconsistentShortcuts("shortcut graph and tree graph differ in size");
  DpSolution sol;
  sol.state = detail::TreeDp(tree, shortcuts, opts).run();
  std::vector<PointId> stack{tree.root};
  while (!stack.empty()) {
    const PointId v = stack.back();
    stack.pop_back();
    sol.kept.push_back(v);
    for (PointId w : sol.state.covers[v]) stack.push_back(w);
  }
  std::sort(sol.kept.begin(), sol.kept.end());
  return sol;
}

/// Shortcut graph of a tree bundle: the sweep for Hausdorff, pairwise for Fréchet.
inline ShortcutGraph build_tree_shortcuts(const Bundle& b, const TreeGraph& tree, double delta,
                                          Metric metric) {
  return metric == Metric::Hausdorff ? build_tree_hausdorff(b, tree, delta)
                                     : build_naive(b, tree, delta, metric);
}

/// Full tree-bundle pipeline: tree graph, shortcut graph, dynamic program.
inline Simplification simplify_tree(const Bundle& b, double delta, Metric metric,
                                    DpOptions opts = {}) {
  const TreeGraph tree = build_tree_graph(b);
  const ShortcutGraph g = build_tree_shortcuts(b, tree, delta, metric);
  auto sol = ptbs_dp(tree, g, opts);
  return make_simplification(b, std::move(sol.kept), metric);
}

}  // namespace pbs
