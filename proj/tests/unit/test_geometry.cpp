#include <gtest/gtest.h>

#include "drivesim/geometry.hpp"
#include "drivesim/random.hpp"
#include "drivesim/synthetic.hpp"
#include "oracles.hpp"

namespace drivesim {
namespace {

std::vector<Vec2> random_polyline(Rng& rng, std::size_t n) {
  std::vector<Vec2> pts;
  Vec2 p{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(p);
    p += Vec2{rng.uniform(0.2, 1.5), rng.uniform(-0.6, 0.6)};
  }
  return pts;
}

// Rigid motion: rotate by `angle` about the origin, then translate.
Obb moved(const Obb& b, double angle, Vec2 shift) {
  return {rotate(b.center, angle) + shift, b.half_length, b.half_width,
          normalize_angle(b.heading + angle)};
}

TEST(Decimation, CollinearInteriorPointIsRemoved) {
  const std::vector<Vec2> pts = {{0, 0}, {1, 0}, {2, 0}};
  EXPECT_EQ(decimate_polyline(pts, 0.01), (std::vector<Vec2>{{0, 0}, {2, 0}}));
}

TEST(Decimation, TwoPointsAreUntouched) {
  const std::vector<Vec2> pts = {{0, 0}, {1, 1}};
  EXPECT_EQ(decimate_polyline(pts, 1e9), pts);
}

TEST(Decimation, ZigZagMatchesReference) {
  const std::vector<Vec2> pts = {{0, 0}, {1, 0.5}, {2, 0}, {3, 0.5}, {4, 0}};
  // Frozen from the brute-force reference: areas tie at 0.5, so points 1
  // then 2 go; point 3 then spans an area of 1.0.
  const std::vector<std::size_t> expected = {0, 3, 4};
  EXPECT_EQ(oracle::decimate_indices(pts, 0.6), expected);
  EXPECT_EQ(decimate_polyline_indices(pts, 0.6), expected);
}

TEST(Decimation, StraightHundredPointsToTwo) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({0.37 * i, -0.5 * i});
  const auto out = decimate_polyline(pts, kDefaultDecimationThreshold);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.front(), pts.front());
  EXPECT_EQ(out.back(), pts.back());
}

TEST(Decimation, ZeroThresholdIsIdentity) {
  Rng rng(3);
  const auto pts = random_polyline(rng, 200);
  EXPECT_EQ(decimate_polyline(pts, 0.0), pts);
}

TEST(Decimation, MatchesReferenceOnRandomPolylines) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pts = random_polyline(rng, 3 + rng.below(60));
    const double thr = rng.uniform(0.0, 0.5);
    ASSERT_EQ(decimate_polyline_indices(pts, thr), oracle::decimate_indices(pts, thr))
        << "trial " << trial;
  }
}

TEST(Decimation, RemovedPointsWereBelowThresholdAndOrderKept) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_polyline(rng, 40);
    const double thr = 0.2;
    const auto keep = decimate_polyline_indices(pts, thr);
    ASSERT_EQ(keep.front(), 0u);
    ASSERT_EQ(keep.back(), pts.size() - 1);
    ASSERT_TRUE(std::is_sorted(keep.begin(), keep.end()));
    // Replay the removals in reference order and check each area.
    std::vector<std::size_t> cur(pts.size());
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = i;
    while (cur.size() > keep.size()) {
      std::size_t best = 1;
      for (std::size_t k = 1; k + 1 < cur.size(); ++k) {
        if (triangle_area(pts[cur[k - 1]], pts[cur[k]], pts[cur[k + 1]]) <
            triangle_area(pts[cur[best - 1]], pts[cur[best]], pts[cur[best + 1]])) {
          best = k;
        }
      }
      ASSERT_LT(triangle_area(pts[cur[best - 1]], pts[cur[best]], pts[cur[best + 1]]), thr);
      cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(best));
    }
    EXPECT_EQ(cur, keep);
  }
}

TEST(Decimation, MostlyStraightCorpusReducesFivefold) {
  std::size_t before = 0;
  std::size_t after = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pts = mostly_straight_polyline(10000, seed);
    const auto keep = decimate_polyline_indices(pts, kDefaultDecimationThreshold);
    before += pts.size();
    after += keep.size();
    EXPECT_EQ(keep, oracle::decimate_indices(pts, kDefaultDecimationThreshold)) << "seed " << seed;
  }
  EXPECT_GE(static_cast<double>(before) / static_cast<double>(after), 5.0);
}

TEST(ObbOverlap, IdenticalBoxes) {
  const Obb a{{1, 2}, 2, 1, 0.3};
  EXPECT_TRUE(obb_overlap(a, a));
}

TEST(ObbOverlap, FarApart) {
  EXPECT_FALSE(obb_overlap({{0, 0}, 0.5, 0.5, 0}, {{10, 0}, 0.5, 0.5, 0}));
}

TEST(ObbOverlap, RotatedNeighbourMatchesSampling) {
  const Obb a{{0, 0}, 1.0, 0.5, 0.0};
  const Obb b{{1.9, 0}, 1.0, 0.5, kPi / 4};
  // Frozen from dense boundary sampling (2000 samples per edge): overlap.
  EXPECT_TRUE(oracle::sampled_obb_overlap(a, b, 2000));
  EXPECT_TRUE(obb_overlap(a, b));
}

TEST(ObbOverlap, TouchingEdgesCount) {
  EXPECT_TRUE(obb_overlap({{0, 0}, 1, 1, 0}, {{2, 0}, 1, 1, 0}));
  EXPECT_FALSE(obb_overlap({{0, 0}, 1, 1, 0}, {{2.000001, 0}, 1, 1, 0}));
}

TEST(ObbOverlap, RandomPairsAgreeWithPolygonOracleAndAreSymmetric) {
  Rng rng(21);
  for (int i = 0; i < 20000; ++i) {
    const Obb a = oracle::random_box(rng, 3.0);
    const Obb b = oracle::random_box(rng, 3.0);
    const bool got = obb_overlap(a, b);
    ASSERT_EQ(got, obb_overlap(b, a));
    ASSERT_EQ(got, oracle::obb_overlap(a, b)) << "pair " << i;
  }
}

TEST(ObbOverlap, InvariantUnderRigidMotion) {
  Rng rng(22);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const Obb a = oracle::random_box(rng, 3.0);
    const Obb b = oracle::random_box(rng, 3.0);
    // Skip near-contact pairs, where 1e-9 motion error may flip the answer.
    const Obb grown{b.center, b.half_length + 1e-6, b.half_width + 1e-6, b.heading};
    const Obb shrunk{b.center, b.half_length - 1e-6, b.half_width - 1e-6, b.heading};
    if (obb_overlap(a, grown) != obb_overlap(a, shrunk)) continue;
    const double angle = rng.uniform(-kPi, kPi);
    const Vec2 shift{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
    ASSERT_EQ(obb_overlap(a, b), obb_overlap(moved(a, angle, shift), moved(b, angle, shift)));
    ++checked;
  }
  EXPECT_GT(checked, 4900);
}

TEST(ObbSegment, ThroughCenter) {
  EXPECT_TRUE(obb_segment_intersect({{0, 0}, 0.5, 0.5, 0}, {{-2, 0}, {2, 0}}));
}

TEST(ObbSegment, FarAway) {
  EXPECT_FALSE(obb_segment_intersect({{0, 0}, 0.5, 0.5, 0}, {{5, 5}, {6, 6}}));
}

TEST(ObbSegment, RotatedGrazingCorner) {
  const Obb box{{0, 0}, 1.0, 0.5, 0.3};
  const Vec2 c = box.corners()[0];
  // Frozen from the polygon oracle: a diagonal segment 0.01 m inside the
  // corner hits, 0.01 m outside misses.
  const Segment inside{{c.x - 0.01 - 1, c.y + 1}, {c.x - 0.01 + 1, c.y - 1}};
  const Segment outside{{c.x + 0.01 - 1, c.y + 1}, {c.x + 0.01 + 1, c.y - 1}};
  EXPECT_TRUE(oracle::obb_segment(box, inside));
  EXPECT_FALSE(oracle::obb_segment(box, outside));
  EXPECT_TRUE(obb_segment_intersect(box, inside));
  EXPECT_FALSE(obb_segment_intersect(box, outside));
}

TEST(ObbSegment, RandomAgreeWithPolygonOracle) {
  Rng rng(31);
  for (int i = 0; i < 20000; ++i) {
    const Obb box = oracle::random_box(rng, 2.0);
    const Segment seg = oracle::random_segment(rng, 4.0, 5.0);
    ASSERT_EQ(obb_segment_intersect(box, seg), oracle::obb_segment(box, seg)) << i;
  }
}

TEST(RayCast, WallAtFive) {
  const Ray ray{{0, 0}, {1, 0}, 100};
  const std::vector<Segment> walls = {{{5, -1}, {5, 1}}};
  const auto hit = ray_cast(ray, {}, walls);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->distance, 5.0);
  EXPECT_EQ(hit->target.kind, EntityRef::Kind::kSegment);
}

TEST(RayCast, EmptyIsMiss) {
  EXPECT_FALSE(ray_cast({{0, 0}, {1, 0}, 100}, {}, {}));
}

TEST(RayCast, ThirtyDegreesIntoRotatedBox) {
  const Ray ray{{0, 0}, unit_vector(kPi / 6), 50};
  const Obb box{{6, 3.2}, 1.5, 0.75, 0.6};
  // Frozen from bisection on the containment test.
  const double expected = 5.2742554203711158;
  ASSERT_NEAR(*oracle::bisect_ray_obb(ray, box, 1e-4), expected, 1e-12);
  const std::vector<Obb> boxes = {box};
  const auto hit = ray_cast(ray, boxes, {});
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->distance, expected, 1e-9);
}

TEST(RayCast, StartingInsideBoxIsZero) {
  const std::vector<Obb> boxes = {{{0, 0}, 1, 1, 0.2}};
  EXPECT_EQ(ray_cast({{0.1, 0.1}, {1, 0}, 10}, boxes, {})->distance, 0.0);
}

TEST(RayCast, BoxDistancesMatchBisection) {
  Rng rng(41);
  int hits = 0;
  for (int i = 0; i < 300; ++i) {
    const Obb box = oracle::random_box(rng, 5.0);
    const Vec2 origin{rng.uniform(-12, 12), rng.uniform(-12, 12)};
    if (box.contains(origin)) continue;
    const Vec2 aim = box.center + Vec2{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
    const Vec2 d = aim - origin;
    const Ray ray{origin, d * (1.0 / norm(d)), 40.0};
    const auto got = ray_obb_distance(ray, box);
    const auto want = oracle::bisect_ray_obb(ray, box, 1e-3);
    ASSERT_EQ(got.has_value(), want.has_value()) << i;
    if (got) {
      EXPECT_NEAR(*got, *want, 1e-9) << i;
      ++hits;
    }
  }
  EXPECT_GT(hits, 200);
}

TEST(RayCast, SegmentDistancesMatchCramer) {
  Rng rng(42);
  for (int i = 0; i < 5000; ++i) {
    const Segment seg = oracle::random_segment(rng, 10.0, 10.0);
    const Ray ray{{rng.uniform(-10, 10), rng.uniform(-10, 10)}, unit_vector(rng.uniform(-kPi, kPi)), 30.0};
    const auto got = ray_segment_distance(ray, seg);
    const auto want = oracle::ray_segment(ray, seg);
    ASSERT_EQ(got.has_value(), want.has_value()) << i;
    if (got) EXPECT_NEAR(*got, *want, 1e-9) << i;
  }
}

TEST(RayCast, AddingPrimitivesNeverIncreasesDistance) {
  Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const Ray ray{{0, 0}, unit_vector(rng.uniform(-kPi, kPi)), 50.0};
    std::vector<Obb> boxes;
    std::vector<Segment> segs;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 30; ++k) {
      if (rng.below(2) == 0) {
        boxes.push_back(oracle::random_box(rng, 20.0));
      } else {
        segs.push_back(oracle::random_segment(rng, 20.0, 10.0));
      }
      const auto hit = ray_cast(ray, boxes, segs);
      const double d = hit ? hit->distance : std::numeric_limits<double>::infinity();
      ASSERT_LE(d, prev);
      prev = d;
    }
  }
}

TEST(RayCast, TiesPreferBoxesThenLowerIndex) {
  const Ray ray{{0, 0}, {1, 0}, 20};
  const std::vector<Obb> boxes = {{{6, 0}, 1, 1, 0}, {{6, 0.5}, 1, 1, 0}};
  const std::vector<Segment> segs = {{{5, -1}, {5, 1}}};
  const auto hit = ray_cast(ray, boxes, segs);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->distance, 5.0);
  EXPECT_EQ(hit->target, (EntityRef{EntityRef::Kind::kBox, 0}));
}

TEST(EgoFrame, Identity) {
  const Pose ego{{3, -2}, 1.1};
  const Pose rel = to_ego_frame(ego, ego);
  EXPECT_EQ(rel.position, (Vec2{0, 0}));
  EXPECT_EQ(rel.heading, 0.0);
}

TEST(EgoFrame, AxisAlignedEgo) {
  const Pose rel = to_ego_frame(Pose{{3, 4}, 1.0}, Pose{{0, 0}, 0.0});
  EXPECT_EQ(rel.position, (Vec2{3, 4}));
  EXPECT_EQ(rel.heading, 1.0);
}

TEST(EgoFrame, RoundTripAndIsometry) {
  Rng rng(51);
  for (int i = 0; i < 1000; ++i) {
    const Pose ego{{rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4)}, rng.uniform(-kPi, kPi)};
    const Pose p{{rng.uniform(-100, 100), rng.uniform(-100, 100)}, rng.uniform(-kPi, kPi)};
    const Pose back = to_ego_frame(from_ego_frame(p, ego), ego);
    EXPECT_NEAR(back.position.x, p.position.x, 1e-9);
    EXPECT_NEAR(back.position.y, p.position.y, 1e-9);
    EXPECT_NEAR(angle_diff(back.heading, p.heading), 0.0, 1e-12);
    EXPECT_GT(back.heading, -kPi);
    EXPECT_LE(back.heading, kPi);

    const Vec2 q = ego.position + Vec2{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    const Vec2 r = ego.position + Vec2{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    EXPECT_NEAR(distance(to_ego_frame(q, ego), to_ego_frame(r, ego)), distance(q, r), 1e-9);
  }
}

}  // namespace
}  // namespace drivesim
