#include "drivesim/policies.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>

namespace drivesim {

namespace {

std::optional<double> parse_number(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::optional<PolicySpec> PolicySpec::parse(std::string_view text) {
  if (text == "random") return PolicySpec{PolicyKind::kRandom, {}};
  if (text == "replay") return PolicySpec{PolicyKind::kReplay, {}};
  if (text == "goal_seek") return PolicySpec{PolicyKind::kGoalSeek, {}};
  if (text == "constant") return PolicySpec{PolicyKind::kConstant, {}};
  constexpr std::string_view prefix = "constant:";
  if (!text.starts_with(prefix)) return std::nullopt;
  text.remove_prefix(prefix.size());
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto accel = parse_number(text.substr(0, colon));
  const auto steer = parse_number(text.substr(colon + 1));
  if (!accel || !steer) return std::nullopt;
  return PolicySpec{PolicyKind::kConstant, {*accel, *steer, 0.0}};
}

std::string PolicySpec::to_string() const {
  switch (kind) {
    case PolicyKind::kRandom: return "random";
    case PolicyKind::kReplay: return "replay";
    case PolicyKind::kGoalSeek: return "goal_seek";
    case PolicyKind::kConstant:
      return "constant:" + format_double(constant.acceleration) + ":" +
             format_double(constant.steering);
  }
  return {};
}

Action goal_seek_action(const AgentState& state, Vec2 goal, double length, DynamicsModel model,
                        const ActionBounds& bounds, const GoalSeekParams& params) {
  const Vec2 to_goal = goal - state.position;
  const double dist = norm(to_goal);
  const double bearing = angle_diff(std::atan2(to_goal.y, to_goal.x), state.heading);
  // Curvature of the circular arc through the goal tangent to the heading.
  const double curvature = dist > 1e-9 ? 2.0 * std::sin(bearing) / dist : 0.0;
  Action action;
  action.steering = model == DynamicsModel::kClassic ? std::atan(length * curvature) : curvature;
  const double target = std::min(params.cruise_speed, params.approach_speed + dist);
  action.acceleration = std::clamp(params.speed_gain * (target - state.speed),
                                   -bounds.max_acceleration, bounds.max_acceleration);
  return action;
}

Action expert_action(const ObjectLog& log, std::size_t t, double dt) {
  if (t + 1 >= log.states.size() || !log.states[t].valid || !log.states[t + 1].valid) return {};
  return invert_action(logged_state(log.states[t]), logged_state(log.states[t + 1]), dt);
}

Policy::Policy(const PolicySpec& spec, std::uint64_t seed) : spec_(spec), rng_(seed) {}

void Policy::act(const SimBatch& batch, std::span<Action> out) {
  const SimConfig& cfg = batch.config();
  for (std::size_t w = 0; w < batch.num_worlds(); ++w) {
    const World& world = batch.world(w);
    const auto& objects = world.scenario().base.objects;
    const std::size_t c0 = batch.controlled_offset(w);
    for (std::size_t c = 0; c < world.num_controlled(); ++c) {
      const std::uint32_t i = world.controlled_agents()[c];
      Action& a = out[c0 + c];
      switch (spec_.kind) {
        case PolicyKind::kRandom:
          a.acceleration = rng_.uniform(-cfg.bounds.max_acceleration, cfg.bounds.max_acceleration);
          a.steering = rng_.uniform(-cfg.bounds.max_steering, cfg.bounds.max_steering);
          a.head_rotation = 0.0;
          break;
        case PolicyKind::kConstant:
          a = spec_.constant;
          break;
        case PolicyKind::kReplay:
          a = expert_action(objects[i], world.step_count(), world.scenario().base.timestep);
          break;
        case PolicyKind::kGoalSeek:
          a = goal_seek_action(world.agent_state(i), objects[i].goal, objects[i].length,
                               cfg.dynamics, cfg.bounds);
          break;
      }
    }
  }
}

ThroughputReport benchmark(std::span<const PreparedScenario> scenarios, const SimConfig& cfg,
                           std::size_t worlds, std::size_t steps, const PolicySpec& policy_spec,
                           std::size_t num_workers) {
  if (scenarios.empty()) {
    throw EngineError(EngineError::Code::kNoScenarios, "benchmark needs at least one scenario");
  }
  std::vector<std::shared_ptr<const PreparedScenario>> shared;
  for (const PreparedScenario& s : scenarios) {
    shared.push_back(std::make_shared<const PreparedScenario>(s));
  }
  std::vector<std::shared_ptr<const PreparedScenario>> assigned;
  for (std::size_t w = 0; w < worlds; ++w) assigned.push_back(shared[w % shared.size()]);
  SimBatch batch(std::move(assigned), cfg, num_workers);
  Policy policy(policy_spec, cfg.seed);
  std::vector<Action> actions(batch.total_controlled());
  batch.reset();

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t s = 0; s < steps; ++s) {
    policy.act(batch, actions);
    batch.step(actions);
    const std::vector<std::size_t> finished = batch.done_worlds();
    if (!finished.empty()) batch.reset(finished);
    batch.clear_episodes();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return make_throughput_report(worlds, steps, elapsed, batch.total_agents(),
                                batch.total_controlled());
}

}  // namespace drivesim
