#pragma once

// Bi-criteria star-cover approximation. A star is a center point with a few
// of its shortcuts; every point of every chosen star is kept, which makes the
// result valid at 2*delta under the Fréchet distance.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <vector>

#include "pbs/geometry.hpp"
#include "pbs/verify.hpp"

namespace pbs {

/// Segments [first, last) of one line bridged by a star.
struct LineInterval {
  LineId line = 0;
  std::uint32_t first = 0;
  std::uint32_t last = 0;
};

struct Star {
  PointId center = kNoPoint;
  std::vector<PointId> shortcuts;  // chosen partners, in choice order
  std::vector<LineInterval> covered;
};

struct StarCover {
  std::vector<Star> stars;   // in selection order
  std::size_t universe = 0;  // number of (line, segment) pairs
};

namespace detail {

/// A shortcut from `center` to `partner` valid on one line, with both
/// positions on that line.
struct StarArm {
  PointId partner;
  LineId line;
  std::uint32_t at_center;
  std::uint32_t at_partner;
};

// Per-line valid shortcuts, grouped by center and sorted by (partner, line).
inline std::vector<std::vector<StarArm>> star_arms(const Bundle& b, double delta) {
  std::vector<std::vector<StarArm>> arms(b.n());
  for (LineId l = 0; l < b.ell(); ++l) {
    const auto pts = b.line_points(l);
    const auto& ids = b.lines[l].points;
    for (std::uint32_t i = 0; i < ids.size(); ++i)
      for (std::uint32_t j = i + 1; j < ids.size(); ++j) {
        const std::span<const Point> sub(pts.data() + i, j - i + 1);
        if (j != i + 1 && !frechet_ok(sub.front(), sub.back(), sub, delta)) continue;
        arms[ids[i]].push_back({ids[j], l, i, j});
        arms[ids[j]].push_back({ids[i], l, j, i});
      }
  }
  for (auto& a : arms)
    std::sort(a.begin(), a.end(), [](const StarArm& x, const StarArm& y) {
      return x.partner != y.partner ? x.partner < y.partner : x.line < y.line;
    });
  return arms;
}

// Uncovered-segment counts with range queries and skip-ahead marking.
class SegmentSet {
public:
  explicit SegmentSet(std::size_t n) : tree_(n + 1, 0), next_(n + 1), size_(n) {
    for (std::size_t i = 0; i < n; ++i) add(i, 1);
    for (std::size_t i = 0; i <= n; ++i) next_[i] = i;
  }
  std::size_t remaining() const { return remaining_; }

  /// Uncovered segments in [a, b).
  std::size_t count(std::size_t a, std::size_t b) const { return prefix(b) - prefix(a); }

  void cover(std::size_t a, std::size_t b) {
    for (std::size_t i = find(a); i < b; i = find(i + 1)) {
      add(i, -1);
      next_[i] = i + 1;
      --remaining_;
    }
  }

private:
  void add(std::size_t i, int d) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += d;
  }
  std::size_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return static_cast<std::size_t>(s);
  }
  std::size_t find(std::size_t i) {
    while (next_[i] != i) {
      next_[i] = next_[next_[i]];
      i = next_[i];
    }
    return i;
  }

  std::vector<std::int64_t> tree_;
  std::vector<std::size_t> next_;
  std::size_t size_;
  std::size_t remaining_ = size_;
};

// gain / cost with cost 0 meaning free; compared exactly.
struct Score {
  std::uint64_t gain = 0;
  std::uint64_t cost = 0;
  bool better_than(const Score& o) const {
    const auto l = gain * o.cost, r = o.gain * cost;
    return l != r ? l > r : gain > o.gain;
  }
  bool same(const Score& o) const { return gain * o.cost == o.gain * cost && gain == o.gain; }
};

class StarGreedy {
public:
  StarGreedy(const Bundle& b, double delta)
      : b_(b), arms_(star_arms(b, delta)), offset_(b.ell() + 1, 0), free_(b.n(), 0) {
    for (LineId l = 0; l < b.ell(); ++l) offset_[l + 1] = offset_[l] + b.lines[l].size() - 1;
    for (const auto& line : b.lines) free_[line.front()] = free_[line.back()] = 1;
    lo_.assign(b.ell(), 0);
    hi_.assign(b.ell(), 0);
    stamp_.assign(b.ell(), 0);
  }

  StarCover run() {
    SegmentSet seg(offset_.back());
    seg_ = &seg;
    StarCover cover;
    cover.universe = offset_.back();
    // Max-heap on score, ties to the lowest center; stored scores are upper
    // bounds because coverage only shrinks.
    auto worse = [](const std::pair<Score, PointId>& x, const std::pair<Score, PointId>& y) {
      if (!x.first.same(y.first)) return y.first.better_than(x.first);
      return x.second > y.second;
    };
    std::priority_queue<std::pair<Score, PointId>, std::vector<std::pair<Score, PointId>>,
                        decltype(worse)>
        heap(worse);
    for (PointId p = 0; p < b_.n(); ++p) {
      Star s;
      const Score sc = evaluate(p, s);
      if (sc.gain > 0) heap.emplace(sc, p);
    }
    while (seg.remaining() > 0) {
      if (heap.empty()) throw Error("star cover incomplete");
      const PointId p = heap.top().second;
      heap.pop();
      Star s;
      const Score sc = evaluate(p, s);
      if (sc.gain == 0) continue;
      if (!heap.empty() && worse({sc, p}, heap.top())) {
        heap.emplace(sc, p);
        continue;
      }
      for (const auto& iv : s.covered) seg.cover(offset_[iv.line] + iv.first, offset_[iv.line] + iv.last);
      cover.stars.push_back(std::move(s));
      heap.emplace(sc, p);  // may still have gain through other arms
    }
    return cover;
  }

private:
  // Best-effort most cost-effective star at p: partners are added by
  // decreasing marginal gain (free partners first) while the ratio does not
  // drop. Fills `out` and returns its score.
  Score evaluate(PointId p, Star& out) {
    const auto& arms = arms_[p];
    ++round_;
    for (const auto& a : arms)
      if (stamp_[a.line] != round_) {
        stamp_[a.line] = round_;
        lo_[a.line] = hi_[a.line] = a.at_center;
      }
    // Partner groups: contiguous ranges of arms sharing a partner.
    groups_.clear();
    for (std::size_t i = 0; i < arms.size();) {
      std::size_t j = i;
      while (j < arms.size() && arms[j].partner == arms[i].partner) ++j;
      groups_.emplace_back(i, j);
      i = j;
    }
    taken_.assign(groups_.size(), 0);
    Score total{0, free_[p] ? 0u : 1u};
    out.center = p;
    while (true) {
      std::size_t best = groups_.size();
      std::uint64_t best_gain = 0;
      bool best_free = false;
      for (std::size_t g = 0; g < groups_.size(); ++g) {
        if (taken_[g]) continue;
        const std::uint64_t mg = marginal(arms, groups_[g]);
        if (mg == 0) continue;
        const bool fr = free_[arms[groups_[g].first].partner] != 0;
        if (best == groups_.size() || (fr && !best_free) || (fr == best_free && mg > best_gain)) {
          best = g;
          best_gain = mg;
          best_free = fr;
        }
      }
      if (best == groups_.size()) break;
      const std::uint64_t cq = best_free ? 0 : 1;
      if (total.gain > 0 && best_gain * total.cost < total.gain * cq) break;
      taken_[best] = 1;
      total.gain += best_gain;
      total.cost += cq;
      out.shortcuts.push_back(arms[groups_[best].first].partner);
      for (std::size_t k = groups_[best].first; k < groups_[best].second; ++k) {
        const auto& a = arms[k];
        lo_[a.line] = std::min(lo_[a.line], a.at_partner);
        hi_[a.line] = std::max(hi_[a.line], a.at_partner);
      }
    }
    out.covered.clear();
    for (const auto& a : arms)
      if (stamp_[a.line] == round_) {
        stamp_[a.line] = round_ - 1;  // emit each line once
        if (lo_[a.line] < hi_[a.line]) out.covered.push_back({a.line, lo_[a.line], hi_[a.line]});
      }
    return total;
  }

  std::uint64_t marginal(const std::vector<StarArm>& arms, std::pair<std::size_t, std::size_t> g) const {
    std::uint64_t mg = 0;
    for (std::size_t k = g.first; k < g.second; ++k) {
      const auto& a = arms[k];
      const std::size_t base = offset_[a.line];
      if (a.at_partner > hi_[a.line])
        mg += seg_->count(base + hi_[a.line], base + a.at_partner);
      else if (a.at_partner < lo_[a.line])
        mg += seg_->count(base + a.at_partner, base + lo_[a.line]);
    }
    return mg;
  }

  const Bundle& b_;
  std::vector<std::vector<StarArm>> arms_;
  std::vector<std::size_t> offset_;
  std::vector<char> free_;  // line endpoints are kept anyway
  SegmentSet* seg_ = nullptr;
  std::vector<std::uint32_t> lo_, hi_, stamp_;
  std::uint32_t round_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> groups_;
  std::vector<char> taken_;
};

}  // namespace detail

/// Greedy weighted set cover over stars: the universe is every (line,
/// segment) pair, a star costs the points it adds beyond line endpoints.
inline StarCover star_cover(const Bundle& b, double delta) {
  check_bundle(b);
  return detail::StarGreedy(b, delta).run();
}

/// Bi-criteria approximation. Kept set = every point of every chosen star
/// plus all line endpoints; distances are measured under Fréchet.
inline Simplification bca_simplify(const Bundle& b, double delta, StarCover* cover_out = nullptr) {
  StarCover cover = star_cover(b, delta);
  std::vector<PointId> kept;
  for (const auto& s : cover.stars) {
    kept.push_back(s.center);
    kept.insert(kept.end(), s.shortcuts.begin(), s.shortcuts.end());
  }
  for (const auto& line : b.lines) {
    kept.push_back(line.front());
    kept.push_back(line.back());
  }
  if (cover_out) *cover_out = std::move(cover);
  return make_simplification(b, std::move(kept), Metric::Frechet);
}

}  // namespace pbs
