#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drivesim/bvh.hpp"
#include "drivesim/dynamics.hpp"
#include "drivesim/observation.hpp"
#include "drivesim/scenario.hpp"
#include "drivesim/worker_pool.hpp"

namespace drivesim {

enum class CollisionBehavior : std::uint8_t { kIgnore, kRemoveAgent, kEndEpisode };
enum class InitMode : std::uint8_t { kAllNontrivial, kAllValid };

std::string_view to_string(CollisionBehavior b);
std::string_view to_string(InitMode m);
std::string_view to_string(DynamicsModel m);
std::optional<CollisionBehavior> parse_collision_behavior(std::string_view name);
std::optional<InitMode> parse_init_mode(std::string_view name);
std::optional<DynamicsModel> parse_dynamics_model(std::string_view name);

struct SimConfig {
  DynamicsModel dynamics = DynamicsModel::kClassic;
  ObsConfig obs;
  double goal_tolerance = 2.0;  // meters, agent center to goal
  CollisionBehavior collision_behavior = CollisionBehavior::kIgnore;
  InitMode init_mode = InitMode::kAllNontrivial;
  double nontrivial_threshold = kDefaultControllableThreshold;
  std::size_t max_controlled_per_world = 128;
  std::uint64_t seed = 0;
  double v_max = 100.0;
  ActionBounds bounds;
};

class EngineError : public Error {
 public:
  enum class Code { kActionCountMismatch, kNoScenarios, kInvalidConfig, kBadWorldId };
  EngineError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

// Throws EngineError{kInvalidConfig} naming the first bad field.
void validate_config(const SimConfig& cfg);

// Events an agent has accumulated during the current episode.
struct AgentInfo {
  std::uint8_t goal = 0;
  std::uint8_t veh_collision = 0;
  std::uint8_t offroad = 0;

  friend bool operator==(const AgentInfo&, const AgentInfo&) = default;
};

// Outcome of one finished episode of one world; `outcomes` has one entry per
// controlled agent.
struct EpisodeRecord {
  std::string scenario;
  std::size_t world = 0;
  std::size_t episode = 0;
  std::vector<AgentInfo> outcomes;
};

// Collision events of one step. Pairs are sorted; agent pairs hold (i, j)
// with i < j, road edge hits hold (agent, edge).
struct CollisionEvents {
  std::vector<Bvh::RefPair> agent_pairs;
  std::vector<Bvh::RefPair> road_edge_hits;

  friend bool operator==(const CollisionEvents&, const CollisionEvents&) = default;
};

// Broad phase over both trees, then exact box/box and box/segment tests.
// Only agents with live[i] take part; only those with edge_sensitive[i] are
// tested against road edges. `agent_tree` refs are agent indices and
// `edge_tree` refs index `edges`.
void detect_collisions(std::span<const Obb> boxes, std::span<const std::uint8_t> live,
                       std::span<const std::uint8_t> edge_sensitive, const Bvh& agent_tree,
                       std::span<const Segment> edges, const Bvh& edge_tree,
                       CollisionEvents& out);

// Leaf bounds used for agents in the dynamic tree.
inline constexpr double kAgentBoxMargin = 0.01;

// Per-world slices of the batch buffers.
struct WorldOutput {
  std::span<double> observations;  // num_controlled * obs width
  std::span<double> rewards;       // num_controlled
  std::span<std::uint8_t> dones;   // num_agents
  std::span<AgentInfo> infos;      // num_agents
};

struct AgentFlags {
  bool controlled = false;
  bool present = false;  // physically in the scene this step
  bool removed = false;  // controlled agent taken out (goal, or collision)
};

// One independent simulation instance of one scenario.
class World {
 public:
  World(std::shared_ptr<const PreparedScenario> scenario, const SimConfig& cfg,
        std::size_t world_index = 0);

  // Restores the initial state and writes first observations.
  void reset(const WorldOutput& out);

  // `actions` has one entry per controlled agent. A finished world ignores
  // its actions and reports every agent done.
  void step(std::span<const Action> actions, const WorldOutput& out);

  // Writes the observation of any present agent.
  void observe(std::size_t agent, std::span<double> out) const;

  const PreparedScenario& scenario() const { return *scenario_; }
  const SimConfig& config() const { return cfg_; }
  std::size_t num_agents() const { return states_.size(); }
  std::size_t num_controlled() const { return controlled_.size(); }
  std::span<const std::uint32_t> controlled_agents() const { return controlled_; }
  std::size_t step_count() const { return t_; }
  bool done() const { return done_; }
  std::size_t episode() const { return episode_; }

  const AgentState& agent_state(std::size_t i) const { return states_[i]; }
  AgentFlags agent_flags(std::size_t i) const;
  const AgentInfo& agent_info(std::size_t i) const { return infos_[i]; }
  double head_angle(std::size_t i) const { return head_angles_[i]; }
  const Obb& agent_box(std::size_t i) const { return scene_agents_[i].box; }

  SceneView scene() const;
  const CollisionEvents& last_collisions() const { return collisions_; }
  std::span<const Segment> road_edges() const { return edges_; }

  // Set once per finished episode; cleared by reset().
  const std::optional<EpisodeRecord>& finished_episode() const { return finished_; }

 private:
  void init_state();
  void sync_scene();
  void write_outputs(const WorldOutput& out, bool terminal_step);
  void finish_episode();
  void replay_agent(std::size_t i, std::size_t log_index);
  EgoContext ego_context(std::size_t agent) const;

  std::shared_ptr<const PreparedScenario> scenario_;
  SimConfig cfg_;
  std::size_t world_index_ = 0;
  std::size_t obs_width_ = 0;

  // Static geometry.
  std::vector<RoadPoint> road_points_;
  std::vector<RoadSegment> road_segments_;
  std::vector<Segment> edges_;
  Bvh point_bvh_;
  Bvh segment_bvh_;
  Bvh edge_bvh_;

  // Per-agent state.
  std::vector<AgentState> states_;
  std::vector<double> head_angles_;
  std::vector<std::uint8_t> is_controlled_;
  std::vector<std::uint8_t> present_;
  std::vector<std::uint8_t> removed_;
  std::vector<std::uint8_t> edge_sensitive_;
  std::vector<AgentInfo> infos_;
  std::vector<std::uint32_t> controlled_;
  std::vector<SceneAgent> scene_agents_;
  Bvh agent_bvh_;

  // Scratch.
  std::vector<Obb> boxes_;
  std::vector<std::uint8_t> live_;
  std::vector<Aabb> leaf_boxes_;
  CollisionEvents collisions_;

  std::size_t t_ = 0;
  std::size_t episode_ = 0;
  bool done_ = false;
  std::optional<EpisodeRecord> finished_;
};

// W independent worlds stepped in lockstep. Buffers are sized by the actual
// agent counts: observations and rewards per controlled agent, dones and
// infos per agent, each laid out world after world.
class SimBatch {
 public:
  // `num_workers` = 0 uses every hardware thread. Throws
  // EngineError{kNoScenarios} for an empty list.
  SimBatch(std::vector<std::shared_ptr<const PreparedScenario>> scenarios, const SimConfig& cfg,
           std::size_t num_workers = 0);

  // Resets every world (or only `world_ids`) and returns the observations.
  std::span<const double> reset();
  std::span<const double> reset(std::span<const std::size_t> world_ids);

  // One action per controlled agent, world after world. Throws
  // EngineError{kActionCountMismatch}.
  void step(std::span<const Action> actions);

  std::size_t num_worlds() const { return worlds_.size(); }
  const World& world(std::size_t w) const { return worlds_[w]; }
  const SimConfig& config() const { return cfg_; }
  std::size_t obs_width() const { return obs_width_; }
  std::size_t total_agents() const { return agent_offsets_.back(); }
  std::size_t total_controlled() const { return controlled_offsets_.back(); }
  std::size_t agent_offset(std::size_t w) const { return agent_offsets_[w]; }
  std::size_t controlled_offset(std::size_t w) const { return controlled_offsets_[w]; }
  std::size_t num_workers() const { return pool_.size(); }

  std::span<const double> observations() const { return observations_; }
  std::span<const double> rewards() const { return rewards_; }
  std::span<const std::uint8_t> dones() const { return dones_; }
  std::span<const AgentInfo> infos() const { return infos_; }

  bool all_done() const;
  std::vector<std::size_t> done_worlds() const;

  // Episodes finished so far, in (step, world) order.
  const std::vector<EpisodeRecord>& episodes() const { return episodes_; }
  void clear_episodes() { episodes_.clear(); }

  // One line per world without controllable agents.
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  WorldOutput slice(std::size_t w);
  void collect_episodes();

  SimConfig cfg_;
  std::size_t obs_width_ = 0;
  std::vector<World> worlds_;
  std::vector<std::size_t> agent_offsets_;
  std::vector<std::size_t> controlled_offsets_;
  std::vector<double> observations_;
  std::vector<double> rewards_;
  std::vector<std::uint8_t> dones_;
  std::vector<AgentInfo> infos_;
  std::vector<EpisodeRecord> episodes_;
  std::vector<std::string> warnings_;
  WorkerPool pool_;
};

SimBatch init_batch(std::span<const PreparedScenario> scenarios, const SimConfig& cfg,
                    std::size_t num_workers = 0);

// Signed speed of a logged step: |v| with the sign of v along the heading.
double logged_speed(const LoggedStep& step);

// Agent state equivalent to a logged step.
AgentState logged_state(const LoggedStep& step);

// Controlled-agent selection for one scenario (object indices, ascending).
std::vector<std::uint32_t> select_controlled(const PreparedScenario& scenario,
                                             const SimConfig& cfg);

}  // namespace drivesim
