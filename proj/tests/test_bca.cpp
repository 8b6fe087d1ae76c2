#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace pbs;

TEST(Bca, StraightLineKeepsEndpoints) {
  std::vector<Point> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({static_cast<double>(i), 0.0});
  StarCover cover;
  const auto s = bca_simplify(ref::single_line(pts), 0.1, &cover);
  EXPECT_EQ(s.kept, (std::vector<PointId>{0, 9}));
  ASSERT_EQ(cover.stars.size(), 1u);
  EXPECT_EQ(cover.stars[0].center, 0u);
  EXPECT_EQ(cover.universe, 9u);
}

TEST(Bca, ZigzagKeepsEverything) {
  std::vector<Point> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({static_cast<double>(i), i % 2 ? 1.0 : 0.0});
  EXPECT_EQ(bca_simplify(ref::single_line(pts), 0.2).size(), 8u);
}

TEST(Bca, ArmsArePerLineShortcuts) {
  // p0 and p2 are adjacent on line 0 but far apart on line 1.
  Bundle b;
  b.points = {{0, 0}, {1, 0}, {2, 0}, {1, 3}};
  b.lines = {{{0, 1, 2}}, {{0, 3, 2}}};
  const auto arms = detail::star_arms(b, 0.5);
  std::vector<std::pair<PointId, LineId>> from0;
  for (const auto& a : arms[0]) from0.emplace_back(a.partner, a.line);
  EXPECT_EQ(from0, (std::vector<std::pair<PointId, LineId>>{{1, 0}, {2, 0}, {3, 1}}));
  const auto s = bca_simplify(b, 0.5);
  EXPECT_EQ(s.kept, (std::vector<PointId>{0, 2, 3}));
}

TEST(Bca, ChosenShortcutEndsAreKept) {
  Rng rng(83);
  for (int it = 0; it < 20; ++it) {
    const auto b = ref::random_ptb(rng, 30);
    StarCover cover;
    const auto s = bca_simplify(b, 0.5, &cover);
    for (const auto& star : cover.stars) {
      EXPECT_TRUE(std::binary_search(s.kept.begin(), s.kept.end(), star.center));
      for (PointId q : star.shortcuts) EXPECT_TRUE(std::binary_search(s.kept.begin(), s.kept.end(), q));
    }
  }
}

TEST(Bca, CoverIsCompleteAndValidAtTwiceDelta) {
  Rng rng(71);
  for (int it = 0; it < 100; ++it) {
    const auto b = it % 2 ? ref::random_general(rng, 2 + rng.below(8), 6, 3 + rng.below(12))
                          : ref::random_ptb(rng, 10 + rng.below(50));
    const double delta = rng.uniform(0.1, 1.5);
    StarCover cover;
    const auto s = bca_simplify(b, delta, &cover);
    std::size_t segments = 0;
    for (const auto& l : b.lines) segments += l.size() - 1;
    EXPECT_EQ(cover.universe, segments);
    ASSERT_TRUE(validate_simplification(b, s.kept, 2.0 * delta, Metric::Frechet).valid)
        << "iteration " << it;
    EXPECT_LE(s.max_achieved(), 2.0 * delta);
    const auto half = bca_simplify(b, delta / 2.0);
    EXPECT_TRUE(validate_simplification(b, half.kept, delta, Metric::Frechet).valid);
  }
}

TEST(Bca, HalvedRunNeverBeatsExactOptimum) {
  // Run at delta/2 the result is valid at delta, so it cannot be smaller
  // than the exact optimum there.
  Rng rng(73);
  int compared = 0;
  for (int it = 0; it < 120; ++it) {
    const auto b = ref::random_ptb(rng, 6 + rng.below(12));
    if (ref::removable_count(b) > 12) continue;
    const double delta = rng.uniform(0.1, 1.5);
    const auto opt = brute_force_pbs(b, delta, Metric::Frechet);
    const auto half = bca_simplify(b, delta / 2.0);
    ASSERT_TRUE(validate_simplification(b, half.kept, delta, Metric::Frechet).valid);
    EXPECT_GE(half.size(), opt.size()) << "iteration " << it;
    ++compared;
  }
  EXPECT_GT(compared, 50);
}

TEST(Bca, Deterministic) {
  Rng rng(79);
  const auto b = ref::random_general(rng, 10, 8, 15);
  const auto a = bca_simplify(b, 0.4);
  const auto c = bca_simplify(b, 0.4);
  EXPECT_EQ(a.kept, c.kept);
}
