#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace pbs;
using ref::bundle_b1;

TEST(Validate, KeepingEverythingIsExact) {
  const auto b = bundle_b1();
  const std::vector<PointId> all{0, 1, 2, 3, 4, 5, 6};
  const auto r = validate_simplification(b, all, 0.0, Metric::Frechet);
  EXPECT_TRUE(r.valid);
  EXPECT_DOUBLE_EQ(r.worst.distance, 0.0);
}

TEST(Validate, BranchPointDroppedFailsOnSecondLine) {
  const auto b = bundle_b1();
  const std::vector<PointId> kept{0, 4, 6};
  const auto r = validate_simplification(b, kept, 0.2, Metric::Hausdorff);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(r.endpoints_kept);
  EXPECT_EQ(r.worst.line, 1u);
  EXPECT_EQ(r.worst.from, 0u);
  EXPECT_EQ(r.worst.to, 6u);
  EXPECT_LE(r.per_line[0], 0.1 + 1e-12);
  EXPECT_NE(r.message.find("line 1"), std::string::npos);
}

TEST(Validate, MissingEndpoint) {
  const auto b = bundle_b1();
  const std::vector<PointId> kept{0, 2, 4, 5};
  const auto r = validate_simplification(b, kept, 10.0, Metric::Frechet);
  EXPECT_FALSE(r.valid);
  EXPECT_FALSE(r.endpoints_kept);
}

TEST(ShortcutDistance, ClosedFormAndBisection) {
  const std::vector<Point> sub{{0, 0}, {5, 3}, {10, 0}};
  EXPECT_DOUBLE_EQ(shortcut_distance(Metric::Hausdorff, sub), 3.0);
  EXPECT_NEAR(shortcut_distance(Metric::Frechet, sub), 3.0, 1e-8);
  // Backtracking by 2 along the segment forces a Fréchet distance of 1.
  const std::vector<Point> zig{{0, 0}, {6, 0}, {4, 0}, {10, 0}};
  EXPECT_DOUBLE_EQ(shortcut_distance(Metric::Hausdorff, zig), 0.0);
  const double f = shortcut_distance(Metric::Frechet, zig);
  EXPECT_NEAR(f, 1.0, 1e-8);
  EXPECT_TRUE(frechet_ok(zig.front(), zig.back(), zig, f));
}

TEST(MakeSimplification, SortsDedupsAndMeasures) {
  const auto b = bundle_b1();
  const auto s = make_simplification(b, {6, 0, 4, 2, 5, 0}, Metric::Hausdorff);
  EXPECT_EQ(s.kept, (std::vector<PointId>{0, 2, 4, 5, 6}));
  EXPECT_EQ(s.per_line[0].kept, (std::vector<PointId>{0, 2, 4}));
  EXPECT_EQ(s.per_line[1].kept, (std::vector<PointId>{0, 2, 5, 6}));
  EXPECT_NEAR(s.per_line[0].achieved, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(s.per_line[1].achieved, 0.1);
}

TEST(BruteForce, BundleB1) {
  EXPECT_EQ(brute_force_pbs(bundle_b1(), 0.2, Metric::Hausdorff),
            (std::vector<PointId>{0, 2, 4, 5, 6}));
  EXPECT_EQ(brute_force_pbs(bundle_b1(), 100.0, Metric::Frechet), (std::vector<PointId>{0, 4, 6}));
}

TEST(BruteForce, RefusesAboveCap) {
  Rng rng(89);
  const auto b = ref::single_line(ref::random_walk(rng, 30));
  EXPECT_THROW(brute_force_pbs(b, 0.5, Metric::Frechet), OracleError);
  EXPECT_NO_THROW(brute_force_pbs(b, 0.5, Metric::Frechet, 28));
}

TEST(BruteForce, ResultIsValidAndMinimalOnSmallBundles) {
  Rng rng(97);
  for (int it = 0; it < 40; ++it) {
    const auto b = ref::random_general(rng, 3, 4, 5);
    if (ref::removable_count(b) > 10) continue;
    const double delta = rng.uniform(0.1, 1.0);
    const auto opt = brute_force_pbs(b, delta, Metric::Frechet);
    EXPECT_TRUE(validate_simplification(b, opt, delta, Metric::Frechet).valid);
    // The exact optimum never exceeds the decomposition heuristic.
    const auto general = simplify_general(b, delta, Metric::Frechet);
    EXPECT_LE(opt.size(), general.simplification.size());
  }
}

TEST(MinLinkPath, PathAndShortcut) {
  ShortcutGraph g;
  g.n = 4;
  g.adjacency = {{1}, {0, 2}, {1, 3}, {2}};
  EXPECT_EQ(min_link_path(g, 0, 3), 3u);
  EXPECT_EQ(min_link_path(g, 2, 2), 0u);
  g.adjacency[0].push_back(3);
  g.adjacency[3].push_back(0);
  EXPECT_EQ(min_link_path(g, 0, 3), 1u);
  EXPECT_THROW(min_link_path(g, 0, 9), Error);
}

TEST(MinLinkPath, UnreachableThrows) {
  ShortcutGraph g;
  g.n = 3;
  g.adjacency = {{1}, {0}, {}};
  EXPECT_THROW(min_link_path(g, 0, 2), Error);
}

TEST(ResultRow, CsvColumns) {
  const auto b = bundle_b1();
  const auto s = simplify_tree(b, 0.2, Metric::Hausdorff);
  const auto row = make_row("dp", 0.2, b, s, 1.5);
  EXPECT_EQ(std::string(ResultRow::kHeader), "algo,delta,delta_f,ratio,n,ell,size,time_ms");
  EXPECT_EQ(row.csv(), "dp,0.2,0.1,0.5,7,2,5,1.500");
}
