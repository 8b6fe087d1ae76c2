#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace pbs;

namespace {

std::vector<Point> zig() { return {{0, 0}, {6, 0.1}, {4, -0.1}, {10, 0}}; }

}  // namespace

TEST(PointSegmentDistance, InteriorFoot) {
  EXPECT_DOUBLE_EQ(point_segment_distance({5, 3}, {0, 0}, {10, 0}), 3.0);
}

TEST(PointSegmentDistance, NearestIsEndpoint) {
  EXPECT_DOUBLE_EQ(point_segment_distance({-3, 4}, {0, 0}, {10, 0}), 5.0);
}

TEST(PointSegmentDistance, OnSegmentAndDegenerate) {
  EXPECT_DOUBLE_EQ(point_segment_distance({5, 0}, {0, 0}, {10, 0}), 0.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({3, 4}, {0, 0}, {0, 0}), 5.0);
}

TEST(HausdorffOk, ExactThresholdIsValid) {
  const std::vector<Point> sub{{0, 0}, {5, 3}, {10, 0}};
  EXPECT_TRUE(hausdorff_ok({0, 0}, {10, 0}, sub, 3.0));
  EXPECT_FALSE(hausdorff_ok({0, 0}, {10, 0}, sub, 2.9));
}

TEST(HausdorffOk, IgnoresBacktracking) {
  EXPECT_TRUE(hausdorff_ok({0, 0}, {10, 0}, zig(), 0.2));
}

TEST(HausdorffOk, EndpointMismatchThrows) {
  const std::vector<Point> sub{{0, 0}, {5, 3}, {10, 0}};
  EXPECT_THROW(hausdorff_ok({0, 0}, {9, 0}, sub, 3.0), ShortcutQueryError);
  EXPECT_THROW(frechet_ok({1, 0}, {10, 0}, sub, 3.0), ShortcutQueryError);
}

TEST(FrechetOk, MatchesHausdorffWhenMonotone) {
  const std::vector<Point> sub{{0, 0}, {5, 3}, {10, 0}};
  EXPECT_TRUE(frechet_ok({0, 0}, {10, 0}, sub, 3.0));
  EXPECT_FALSE(frechet_ok({0, 0}, {10, 0}, sub, 2.9));
}

TEST(FrechetOk, BacktrackingSeparatesMetrics) {
  EXPECT_FALSE(frechet_ok({0, 0}, {10, 0}, zig(), 0.2));
  EXPECT_TRUE(ref::frechet_decide({{0, 0}, {10, 0}}, zig(), 1.1));
  EXPECT_FALSE(ref::frechet_decide({{0, 0}, {10, 0}}, zig(), 0.2));
}

TEST(FrechetOk, TwoPointSubIsAlwaysValid) {
  const std::vector<Point> sub{{1, 2}, {3, -4}};
  EXPECT_TRUE(frechet_ok(sub[0], sub[1], sub, 0.0));
  EXPECT_TRUE(hausdorff_ok(sub[0], sub[1], sub, 0.0));
}

TEST(FrechetOk, DegenerateSegment) {
  const std::vector<Point> loop{{0, 0}, {0.5, 0.5}, {0, 0}};
  EXPECT_TRUE(frechet_ok({0, 0}, {0, 0}, loop, 0.75));
  EXPECT_FALSE(frechet_ok({0, 0}, {0, 0}, loop, 0.7));
}

TEST(FrechetOk, AgreesWithFreeSpaceOracle) {
  Rng rng(7);
  int checked = 0;
  for (int it = 0; it < 3000; ++it) {
    const auto pts = ref::random_walk(rng, 3 + rng.below(8), 2.5);
    const double delta = rng.uniform(0.05, 2.0);
    const bool mine = frechet_ok(pts.front(), pts.back(), pts, delta);
    const bool ref = ref::frechet_decide({pts.front(), pts.back()}, pts, delta);
    ASSERT_EQ(mine, ref) << "iteration " << it << " delta " << delta;
    ++checked;
  }
  EXPECT_EQ(checked, 3000);
}

TEST(Metrics, FrechetImpliesHausdorffAndMonotoneInDelta) {
  Rng rng(11);
  for (int it = 0; it < 2000; ++it) {
    const auto pts = ref::random_walk(rng, 3 + rng.below(10), 2.0);
    const double d1 = rng.uniform(0.0, 1.5), d2 = d1 + rng.uniform(0.0, 1.0);
    for (Metric m : {Metric::Hausdorff, Metric::Frechet})
      if (shortcut_ok(m, pts, d1)) EXPECT_TRUE(shortcut_ok(m, pts, d2));
    if (shortcut_ok(Metric::Frechet, pts, d1)) EXPECT_TRUE(shortcut_ok(Metric::Hausdorff, pts, d1));
  }
}

TEST(Bundle, CheckRejectsBadInput) {
  Bundle b = ref::bundle_b1();
  EXPECT_NO_THROW(check_bundle(b));
  Bundle repeat = b;
  repeat.lines[0].points.push_back(1);
  EXPECT_THROW(check_bundle(repeat), BundleError);
  Bundle range = b;
  range.lines[1].points.push_back(99);
  EXPECT_THROW(check_bundle(range), BundleError);
  Bundle shortline = b;
  shortline.lines.push_back({{3}});
  EXPECT_THROW(check_bundle(shortline), BundleError);
  Bundle nan = b;
  nan.points[2].x = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(check_bundle(nan), BundleError);
}

TEST(Metric, ParseRoundTrip) {
  EXPECT_EQ(parse_metric(to_string(Metric::Hausdorff)), Metric::Hausdorff);
  EXPECT_EQ(parse_metric(to_string(Metric::Frechet)), Metric::Frechet);
  EXPECT_THROW(parse_metric("manhattan"), Error);
}
