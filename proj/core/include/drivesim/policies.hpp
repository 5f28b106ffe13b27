#pragma once

#include <span>
#include <string>
#include <string_view>

#include "drivesim/engine.hpp"
#include "drivesim/metrics.hpp"
#include "drivesim/random.hpp"

namespace drivesim {

enum class PolicyKind : std::uint8_t { kRandom, kConstant, kReplay, kGoalSeek };

// Textual forms: "random", "replay", "goal_seek", "constant" (zero action)
// and "constant:<acceleration>:<steering>".
struct PolicySpec {
  PolicyKind kind = PolicyKind::kConstant;
  Action constant;

  static std::optional<PolicySpec> parse(std::string_view text);
  std::string to_string() const;
};

// Pure pursuit toward the goal with a proportional speed loop.
struct GoalSeekParams {
  double cruise_speed = 15.0;   // m/s
  double approach_speed = 3.0;  // target speed at the goal, m/s
  double speed_gain = 1.0;      // 1/s
};

Action goal_seek_action(const AgentState& state, Vec2 goal, double length, DynamicsModel model,
                        const ActionBounds& bounds, const GoalSeekParams& params = {});

// Invertible-model action that moves `agent` from its logged step t to
// t + 1; zero when either step is missing or invalid.
Action expert_action(const ObjectLog& log, std::size_t t, double dt);

// Produces one action per controlled agent of a batch. Random actions come
// from a single stream consumed in buffer order, so they do not depend on
// the worker count.
class Policy {
 public:
  Policy(const PolicySpec& spec, std::uint64_t seed);

  void act(const SimBatch& batch, std::span<Action> out);

  const PolicySpec& spec() const { return spec_; }

 private:
  PolicySpec spec_;
  Rng rng_;
};

// Steps `worlds` worlds (scenarios assigned round robin) for `steps` steps
// under `policy`, resetting finished worlds inside the timed loop. Setup
// and the first reset are not timed.
ThroughputReport benchmark(std::span<const PreparedScenario> scenarios, const SimConfig& cfg,
                           std::size_t worlds, std::size_t steps, const PolicySpec& policy,
                           std::size_t num_workers = 0);

}  // namespace drivesim
