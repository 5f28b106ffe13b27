#include <benchmark/benchmark.h>

#include "drivesim/bvh.hpp"
#include "drivesim/engine.hpp"
#include "drivesim/policies.hpp"
#include "drivesim/random.hpp"
#include "drivesim/synthetic.hpp"

namespace {

using namespace drivesim;

std::vector<Obb> random_boxes(std::size_t n, double extent, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Obb> boxes;
  for (std::size_t i = 0; i < n; ++i) {
    boxes.push_back({{rng.uniform(-extent, extent), rng.uniform(-extent, extent)}, 2.25, 1.0,
                     rng.uniform(-kPi, kPi)});
  }
  return boxes;
}

void BM_Decimate(benchmark::State& state) {
  const auto pts = mostly_straight_polyline(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decimate_polyline_indices(pts, kDefaultDecimationThreshold));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Decimate)->Arg(1000)->Arg(10000);

void BM_BvhBuild(benchmark::State& state) {
  const auto boxes = random_boxes(static_cast<std::size_t>(state.range(0)), 200, 2);
  std::vector<Bvh::Entity> e;
  for (std::uint32_t i = 0; i < boxes.size(); ++i) e.push_back({i, Aabb::of_obb(boxes[i])});
  for (auto _ : state) benchmark::DoNotOptimize(Bvh::build(e));
}
BENCHMARK(BM_BvhBuild)->Arg(128)->Arg(2000);

void BM_BvhRefitAndPairs(benchmark::State& state) {
  auto boxes = random_boxes(static_cast<std::size_t>(state.range(0)), 100, 3);
  std::vector<Bvh::Entity> e;
  std::vector<Aabb> leaves;
  for (std::uint32_t i = 0; i < boxes.size(); ++i) {
    e.push_back({i, Aabb::of_obb(boxes[i])});
    leaves.push_back(e.back().box);
  }
  Bvh bvh = Bvh::build(e);
  std::vector<Bvh::RefPair> pairs;
  for (auto _ : state) {
    bvh.refit(leaves);
    pairs.clear();
    bvh.query_pairs(pairs);
    benchmark::DoNotOptimize(pairs.data());
  }
}
BENCHMARK(BM_BvhRefitAndPairs)->Arg(128)->Arg(1024);

void BM_RayCastBruteForce(benchmark::State& state) {
  const auto boxes = random_boxes(static_cast<std::size_t>(state.range(0)), 60, 4);
  Rng rng(5);
  for (auto _ : state) {
    const Ray ray{{0, 0}, unit_vector(rng.uniform(-kPi, kPi)), 100};
    benchmark::DoNotOptimize(ray_cast(ray, boxes, {}));
  }
}
BENCHMARK(BM_RayCastBruteForce)->Arg(128);

void BM_RayCastBvh(benchmark::State& state) {
  const auto boxes = random_boxes(static_cast<std::size_t>(state.range(0)), 60, 4);
  std::vector<Bvh::Entity> e;
  for (std::uint32_t i = 0; i < boxes.size(); ++i) e.push_back({i, Aabb::of_obb(boxes[i])});
  const Bvh bvh = Bvh::build(e);
  Rng rng(5);
  for (auto _ : state) {
    const Ray ray{{0, 0}, unit_vector(rng.uniform(-kPi, kPi)), 100};
    std::optional<Hit> best;
    bvh.query_ray(ray, [&](Bvh::Ref r) {
      if (auto d = ray_obb_distance(ray, boxes[r])) keep_nearer(best, {*d, {EntityRef::Kind::kBox, r}});
    });
    benchmark::DoNotOptimize(best);
  }
}
BENCHMARK(BM_RayCastBvh)->Arg(128);

void BM_BatchStep(benchmark::State& state) {
  SimConfig cfg;
  cfg.obs.mode = static_cast<ObsMode>(state.range(1));
  const auto p = std::make_shared<const PreparedScenario>(
      preprocess(generate_synthetic({MapTemplate::kIntersection, 16, 1})));
  SimBatch batch(std::vector(static_cast<std::size_t>(state.range(0)), p), cfg, 1);
  batch.reset();
  Policy policy(*PolicySpec::parse("random"), 0);
  std::vector<Action> actions(batch.total_controlled());
  for (auto _ : state) {
    policy.act(batch, actions);
    batch.step(actions);
    if (batch.all_done()) batch.reset();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.total_agents()));
}
BENCHMARK(BM_BatchStep)
    ->Args({16, static_cast<int>(ObsMode::kRadial)})
    ->Args({16, static_cast<int>(ObsMode::kLidar)});

}  // namespace

BENCHMARK_MAIN();
