#pragma once

// Hand-built scenarios for engine semantics tests.

#include <cstdint>
#include <memory>
#include <vector>

#include "drivesim/engine.hpp"
#include "drivesim/scenario.hpp"
#include "drivesim/synthetic.hpp"

namespace scripted {

using namespace drivesim;

// Object moving at constant velocity along `heading`; the goal is free.
inline ObjectLog mover(std::int64_t id, ObjectKind kind, Vec2 start, double heading, double speed,
                       Vec2 goal, int num_steps, double dt = 0.1, double length = 4.0,
                       double width = 2.0) {
  ObjectLog o;
  o.id = id;
  o.kind = kind;
  o.length = length;
  o.width = width;
  o.goal = goal;
  const Vec2 v = unit_vector(heading) * speed;
  for (int t = 0; t < num_steps; ++t) o.states.push_back({start + v * (dt * t), heading, v, true});
  return o;
}

inline Scenario scene(std::vector<ObjectLog> objects, std::vector<RoadElement> roads = {},
                      int num_steps = 20) {
  Scenario s;
  s.name = "scripted";
  s.num_steps = num_steps;
  s.objects = std::move(objects);
  s.roads = std::move(roads);
  return s;
}

inline std::shared_ptr<const PreparedScenario> prepared(const Scenario& s,
                                                        double controllable_threshold = 2.0) {
  return std::make_shared<const PreparedScenario>(preprocess(s, 0.05, controllable_threshold));
}

inline std::shared_ptr<const PreparedScenario> synthetic(MapTemplate t, std::size_t n,
                                                         std::uint64_t seed) {
  return std::make_shared<const PreparedScenario>(preprocess(generate_synthetic({t, n, seed})));
}

// A single world plus its own output buffers.
struct Solo {
  World world;
  std::vector<double> obs;
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;
  std::vector<AgentInfo> infos;

  Solo(std::shared_ptr<const PreparedScenario> p, const SimConfig& cfg)
      : world(std::move(p), cfg),
        obs(world.num_controlled() * obs_layout(cfg.obs).width),
        rewards(world.num_controlled()),
        dones(world.num_agents()),
        infos(world.num_agents()) {}

  WorldOutput out() { return {obs, rewards, dones, infos}; }
  void reset() { world.reset(out()); }
  void step(std::vector<Action> actions) { world.step(actions, out()); }
  void step_zero() { step(std::vector<Action>(world.num_controlled())); }
};

}  // namespace scripted
