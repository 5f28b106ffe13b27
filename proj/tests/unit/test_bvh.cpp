#include <gtest/gtest.h>

#include <algorithm>

#include "drivesim/bvh.hpp"
#include "oracles.hpp"

namespace drivesim {
namespace {

std::vector<Bvh::Entity> random_entities(Rng& rng, std::size_t n, double extent) {
  std::vector<Bvh::Entity> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({static_cast<Bvh::Ref>(i), Aabb::of_obb(oracle::random_box(rng, extent))});
  }
  return out;
}

// Recursive containment check; returns the number of leaves reached.
std::size_t check_containment(const Bvh& bvh, std::int32_t node) {
  const auto& n = bvh.nodes()[node];
  if (n.is_leaf()) return 1;
  EXPECT_TRUE(n.box.contains(bvh.nodes()[n.left].box));
  EXPECT_TRUE(n.box.contains(bvh.nodes()[n.right].box));
  return check_containment(bvh, n.left) + check_containment(bvh, n.right);
}

std::vector<Bvh::RefPair> sorted(std::vector<Bvh::RefPair> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<Aabb> boxes_of(const std::vector<Bvh::Entity>& e) {
  std::vector<Aabb> out;
  for (const auto& x : e) out.push_back(x.box);
  return out;
}

TEST(Bvh, EmptyInputThrows) {
  try {
    Bvh::build({});
    FAIL();
  } catch (const BvhError& e) {
    EXPECT_EQ(e.code(), BvhError::Code::kEmptyInput);
  }
}

TEST(Bvh, SingleEntity) {
  const Aabb box{{1, 2}, {3, 5}};
  const std::vector<Bvh::Entity> e = {{7, box}};
  const Bvh bvh = Bvh::build(e);
  EXPECT_EQ(bvh.size(), 1u);
  EXPECT_EQ(bvh.root_box(), box);
  EXPECT_TRUE(bvh.query_pairs().empty());
}

TEST(Bvh, TwoDisjoint) {
  const std::vector<Bvh::Entity> e = {{0, {{0, 0}, {1, 1}}}, {1, {{5, 5}, {6, 7}}}};
  const Bvh bvh = Bvh::build(e);
  EXPECT_EQ(bvh.root_box(), (Aabb{{0, 0}, {6, 7}}));
  EXPECT_TRUE(bvh.query_pairs().empty());
}

TEST(Bvh, TwoOverlapping) {
  const std::vector<Bvh::Entity> e = {{4, {{0, 0}, {2, 2}}}, {9, {{1, 1}, {3, 3}}}};
  EXPECT_EQ(Bvh::build(e).query_pairs(), (std::vector<Bvh::RefPair>{{4, 9}}));
}

TEST(Bvh, ContainmentOnThousandEntities) {
  Rng rng(1);
  const auto e = random_entities(rng, 1000, 100.0);
  const Bvh bvh = Bvh::build(e);
  EXPECT_EQ(check_containment(bvh, 0), 1000u);
  for (std::size_t slot = 0; slot < e.size(); ++slot) {
    EXPECT_TRUE(bvh.leaf_box(slot).contains(e[slot].box));
  }
}

TEST(Bvh, RefitUnchangedIsIdempotent) {
  Rng rng(2);
  const auto e = random_entities(rng, 300, 50.0);
  Bvh bvh = Bvh::build(e);
  const std::vector<Bvh::Node> before(bvh.nodes().begin(), bvh.nodes().end());
  bvh.refit(boxes_of(e));
  ASSERT_EQ(bvh.nodes().size(), before.size());
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(bvh.nodes()[i].box, before[i].box);
}

TEST(Bvh, RefitTranslationShiftsEveryNode) {
  Rng rng(3);
  auto e = random_entities(rng, 300, 50.0);
  Bvh bvh = Bvh::build(e);
  const std::vector<Bvh::Node> before(bvh.nodes().begin(), bvh.nodes().end());
  std::vector<Aabb> shifted;
  for (const auto& x : e) shifted.push_back({x.box.min + Vec2{5, 0}, x.box.max + Vec2{5, 0}});
  bvh.refit(shifted);
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(bvh.nodes()[i].box.min, before[i].box.min + Vec2(5, 0));
    EXPECT_EQ(bvh.nodes()[i].box.max, before[i].box.max + Vec2(5, 0));
    EXPECT_EQ(bvh.nodes()[i].left, before[i].left);
    EXPECT_EQ(bvh.nodes()[i].right, before[i].right);
  }
}

TEST(Bvh, RefitRandomMotionKeepsInvariantAndTopology) {
  Rng rng(4);
  auto e = random_entities(rng, 500, 50.0);
  Bvh bvh = Bvh::build(e);
  const std::vector<Bvh::Ref> refs(bvh.refs().begin(), bvh.refs().end());
  for (int round = 0; round < 10; ++round) {
    for (auto& x : e) {
      const Vec2 d{rng.uniform(-20, 20), rng.uniform(-20, 20)};
      x.box = {x.box.min + d, x.box.max + d};
    }
    bvh.refit(boxes_of(e));
    EXPECT_EQ(check_containment(bvh, 0), e.size());
    EXPECT_TRUE(std::equal(refs.begin(), refs.end(), bvh.refs().begin()));
    EXPECT_EQ(sorted(bvh.query_pairs()), oracle::aabb_pairs(boxes_of(e)));
  }
}

TEST(Bvh, RefitLengthMismatch) {
  Rng rng(5);
  Bvh bvh = Bvh::build(random_entities(rng, 10, 5.0));
  try {
    bvh.refit(std::vector<Aabb>(9));
    FAIL();
  } catch (const BvhError& e) {
    EXPECT_EQ(e.code(), BvhError::Code::kLengthMismatch);
  }
}

TEST(Bvh, PairsEqualBruteForce) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto e = random_entities(rng, 200, 20.0);
    EXPECT_EQ(sorted(Bvh::build(e).query_pairs()), oracle::aabb_pairs(boxes_of(e)));
  }
}

TEST(Bvh, TouchingBoxesPair) {
  const std::vector<Bvh::Entity> e = {{0, {{0, 0}, {1, 1}}}, {1, {{1, 0}, {2, 1}}}};
  EXPECT_EQ(Bvh::build(e).query_pairs().size(), 1u);
}

TEST(Bvh, EmptyLeafBoxesNeverPairOrHit) {
  const std::vector<Bvh::Entity> e = {{0, {{0, 0}, {1, 1}}}, {1, {{0, 0}, {1, 1}}}};
  Bvh bvh = Bvh::build(e);
  bvh.refit(std::vector<Aabb>{{{0, 0}, {1, 1}}, Aabb::empty()});
  EXPECT_TRUE(bvh.query_pairs().empty());
  EXPECT_EQ(bvh.query_ray({{-5, 0.5}, {1, 0}, 100}), (std::vector<Bvh::Ref>{0}));
}

TEST(Bvh, CrossTreePairsEqualBruteForce) {
  Rng rng(7);
  const auto a = random_entities(rng, 150, 20.0);
  const auto b = random_entities(rng, 170, 20.0);
  std::vector<Bvh::RefPair> got;
  Bvh::build(a).query_pairs(Bvh::build(b), got);
  std::vector<Bvh::RefPair> want;
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (x.box.overlaps(y.box)) want.emplace_back(x.ref, y.ref);
    }
  }
  EXPECT_EQ(sorted(got), sorted(want));
}

TEST(Bvh, DeterministicBuild) {
  Rng r1(8), r2(8);
  const Bvh a = Bvh::build(random_entities(r1, 400, 30.0));
  const Bvh b = Bvh::build(random_entities(r2, 400, 30.0));
  ASSERT_EQ(a.nodes().size(), b.nodes().size());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    EXPECT_EQ(a.nodes()[i].box, b.nodes()[i].box);
    EXPECT_EQ(a.nodes()[i].left, b.nodes()[i].left);
    EXPECT_EQ(a.nodes()[i].right, b.nodes()[i].right);
  }
  EXPECT_EQ(a.query_pairs(), b.query_pairs());
}

TEST(Bvh, RayMissingEverything) {
  const std::vector<Bvh::Entity> e = {{0, {{0, 0}, {1, 1}}}, {1, {{3, 3}, {4, 4}}}};
  EXPECT_TRUE(Bvh::build(e).query_ray({{-5, 10}, {1, 0}, 100}).empty());
}

TEST(Bvh, RayThroughSingleLeaf) {
  const std::vector<Bvh::Entity> e = {{0, {{0, 0}, {1, 1}}}, {1, {{3, 3}, {4, 4}}}};
  EXPECT_EQ(Bvh::build(e).query_ray({{-5, 0.5}, {1, 0}, 100}), (std::vector<Bvh::Ref>{0}));
}

TEST(Bvh, RayCandidatesCoverTrueHits) {
  Rng rng(9);
  std::vector<Obb> boxes;
  std::vector<Bvh::Entity> e;
  for (std::uint32_t i = 0; i < 200; ++i) {
    boxes.push_back(oracle::random_box(rng, 30.0));
    e.push_back({i, Aabb::of_obb(boxes.back())});
  }
  const Bvh bvh = Bvh::build(e);
  for (int r = 0; r < 500; ++r) {
    const Ray ray{{rng.uniform(-35, 35), rng.uniform(-35, 35)}, unit_vector(rng.uniform(-kPi, kPi)),
                  rng.uniform(5, 60)};
    auto cand = bvh.query_ray(ray);
    std::sort(cand.begin(), cand.end());
    for (std::uint32_t i = 0; i < boxes.size(); ++i) {
      if (ray_obb_distance(ray, boxes[i])) {
        EXPECT_TRUE(std::binary_search(cand.begin(), cand.end(), i)) << "ray " << r << " box " << i;
      }
      // Every candidate's box is actually crossed by the ray.
    }
    for (Bvh::Ref ref : cand) EXPECT_TRUE(e[ref].box.hit_by(ray));
  }
}

TEST(Bvh, SoundnessAgainstNarrowPhase) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Obb> boxes;
    std::vector<Bvh::Entity> e;
    for (std::uint32_t i = 0; i < 150; ++i) {
      boxes.push_back(oracle::random_box(rng, 15.0));
      e.push_back({i, Aabb::of_obb(boxes.back(), 0.01)});
    }
    auto pairs = sorted(Bvh::build(e).query_pairs());
    for (std::uint32_t i = 0; i < boxes.size(); ++i) {
      for (std::uint32_t j = i + 1; j < boxes.size(); ++j) {
        if (obb_overlap(boxes[i], boxes[j])) {
          EXPECT_TRUE(std::binary_search(pairs.begin(), pairs.end(), Bvh::RefPair{i, j}));
        }
      }
    }
  }
}

}  // namespace
}  // namespace drivesim
