#include <algorithm>
#include <array>

#include "drivesim/engine.hpp"

namespace drivesim {

namespace {

constexpr std::array<std::string_view, 3> kBehaviorNames = {"ignore", "remove_agent",
                                                            "end_episode"};
constexpr std::array<std::string_view, 2> kInitNames = {"all_nontrivial", "all_valid"};
constexpr std::array<std::string_view, 2> kDynamicsNames = {"classic", "invertible"};

template <typename Enum, std::size_t N>
std::optional<Enum> parse_name(const std::array<std::string_view, N>& names,
                               std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

Obb box_of(const ObjectLog& obj, const AgentState& s) {
  return {s.position, 0.5 * obj.length, 0.5 * obj.width, s.heading};
}

template <typename T>
Bvh build_tree(const std::vector<T>& items, auto&& box_fn) {
  if (items.empty()) return {};
  std::vector<Bvh::Entity> entities;
  entities.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    entities.push_back({static_cast<Bvh::Ref>(i), box_fn(items[i])});
  }
  return Bvh::build(entities);
}

}  // namespace

std::string_view to_string(CollisionBehavior b) {
  return kBehaviorNames[static_cast<std::size_t>(b)];
}
std::string_view to_string(InitMode m) { return kInitNames[static_cast<std::size_t>(m)]; }
std::string_view to_string(DynamicsModel m) { return kDynamicsNames[static_cast<std::size_t>(m)]; }

std::optional<CollisionBehavior> parse_collision_behavior(std::string_view name) {
  return parse_name<CollisionBehavior>(kBehaviorNames, name);
}
std::optional<InitMode> parse_init_mode(std::string_view name) {
  return parse_name<InitMode>(kInitNames, name);
}
std::optional<DynamicsModel> parse_dynamics_model(std::string_view name) {
  return parse_name<DynamicsModel>(kDynamicsNames, name);
}

void validate_config(const SimConfig& cfg) {
  auto fail = [](const std::string& what) {
    throw EngineError(EngineError::Code::kInvalidConfig, what);
  };
  if (!(cfg.goal_tolerance > 0.0)) fail("goal_tolerance must be positive");
  if (!(cfg.nontrivial_threshold >= 0.0)) fail("nontrivial_threshold must be >= 0");
  if (!(cfg.v_max > 0.0)) fail("v_max must be positive");
  if (!(cfg.bounds.max_acceleration >= 0.0)) fail("max_acceleration must be >= 0");
  if (!(cfg.bounds.max_steering >= 0.0)) fail("max_steering must be >= 0");
  if (cfg.obs.n_rays < 1) fail("obs.n_rays must be >= 1");
  if (!(cfg.obs.fov > 0.0 && cfg.obs.fov <= kTwoPi)) fail("obs.fov must be in (0, 2*pi]");
  if (!(cfg.obs.max_range > 0.0)) fail("obs.max_range must be positive");
  if (!(cfg.obs.radius >= 0.0)) fail("obs.radius must be >= 0");
}

double logged_speed(const LoggedStep& step) {
  const double speed = norm(step.velocity);
  return dot(step.velocity, unit_vector(step.heading)) < 0.0 ? -speed : speed;
}

AgentState logged_state(const LoggedStep& step) {
  return {step.position, step.heading, logged_speed(step), step.velocity};
}

std::vector<std::uint32_t> select_controlled(const PreparedScenario& scenario,
                                             const SimConfig& cfg) {
  const auto& objects = scenario.base.objects;
  std::vector<bool> filter;
  if (cfg.init_mode == InitMode::kAllNontrivial) {
    filter = mark_controllable(scenario.base, cfg.nontrivial_threshold);
  } else {
    filter.resize(objects.size());
    for (std::size_t i = 0; i < objects.size(); ++i) {
      filter[i] = !objects[i].force_replay && !objects[i].states.empty() &&
                  objects[i].states.front().valid;
    }
  }
  std::vector<std::uint32_t> picked;
  for (std::uint32_t i = 0; i < objects.size(); ++i) {
    if (i < scenario.controllable.size() && scenario.controllable[i] && filter[i]) {
      picked.push_back(i);
    }
  }
  std::sort(picked.begin(), picked.end(),
            [&](std::uint32_t a, std::uint32_t b) { return objects[a].id < objects[b].id; });
  if (picked.size() > cfg.max_controlled_per_world) picked.resize(cfg.max_controlled_per_world);
  std::sort(picked.begin(), picked.end());
  return picked;
}

void detect_collisions(std::span<const Obb> boxes, std::span<const std::uint8_t> live,
                       std::span<const std::uint8_t> edge_sensitive, const Bvh& agent_tree,
                       std::span<const Segment> edges, const Bvh& edge_tree,
                       CollisionEvents& out) {
  out.agent_pairs.clear();
  out.road_edge_hits.clear();
  agent_tree.query_pairs(out.agent_pairs);
  std::erase_if(out.agent_pairs, [&](const Bvh::RefPair& p) {
    return !(live[p.first] && live[p.second] && obb_overlap(boxes[p.first], boxes[p.second]));
  });
  agent_tree.query_pairs(edge_tree, out.road_edge_hits);
  std::erase_if(out.road_edge_hits, [&](const Bvh::RefPair& p) {
    return !(live[p.first] && edge_sensitive[p.first] &&
             obb_segment_intersect(boxes[p.first], edges[p.second]));
  });
  std::sort(out.agent_pairs.begin(), out.agent_pairs.end());
  std::sort(out.road_edge_hits.begin(), out.road_edge_hits.end());
}

World::World(std::shared_ptr<const PreparedScenario> scenario, const SimConfig& cfg,
             std::size_t world_index)
    : scenario_(std::move(scenario)), cfg_(cfg), world_index_(world_index) {
  validate_config(cfg_);
  obs_width_ = obs_layout(cfg_.obs).width;

  road_points_ = build_road_points(scenario_->decimated_roads);
  road_segments_ = build_road_segments(scenario_->decimated_roads);
  for (const RoadSegment& s : road_segments_) {
    if (s.kind == RoadKind::kRoadEdge) edges_.push_back(s.seg);
  }
  point_bvh_ = build_tree(road_points_, [](const RoadPoint& p) { return Aabb::of_point(p.position); });
  segment_bvh_ = build_tree(road_segments_, [](const RoadSegment& s) { return Aabb::of_segment(s.seg); });
  edge_bvh_ = build_tree(edges_, [](const Segment& s) { return Aabb::of_segment(s); });

  const auto& objects = scenario_->base.objects;
  const std::size_t n = objects.size();
  states_.resize(n);
  head_angles_.resize(n);
  is_controlled_.assign(n, 0);
  present_.resize(n);
  removed_.resize(n);
  edge_sensitive_.resize(n);
  infos_.resize(n);
  scene_agents_.resize(n);
  boxes_.resize(n);
  live_.resize(n);
  leaf_boxes_.resize(n);
  controlled_ = select_controlled(*scenario_, cfg_);
  for (std::uint32_t i : controlled_) is_controlled_[i] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    edge_sensitive_[i] = objects[i].kind != ObjectKind::kPedestrian;
    scene_agents_[i].id = objects[i].id;
    scene_agents_[i].kind = objects[i].kind;
  }

  init_state();
  // Topology comes from the initial poses of every agent, present or not.
  std::vector<Bvh::Entity> entities(n);
  for (std::size_t i = 0; i < n; ++i) {
    entities[i] = {static_cast<Bvh::Ref>(i), Aabb::of_obb(boxes_[i], kAgentBoxMargin)};
  }
  if (n > 0) agent_bvh_ = Bvh::build(entities);
  sync_scene();
}

void World::init_state() {
  const auto& objects = scenario_->base.objects;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const ObjectLog& obj = objects[i];
    const std::size_t first = obj.first_valid().value_or(0);
    states_[i] = first < obj.states.size() ? logged_state(obj.states[first]) : AgentState{};
    present_[i] = !obj.states.empty() && obj.states.front().valid;
    removed_[i] = 0;
    head_angles_[i] = 0.0;
    infos_[i] = {};
    boxes_[i] = box_of(obj, states_[i]);
  }
  t_ = 0;
  done_ = false;
  collisions_ = {};
  finished_.reset();
}

void World::sync_scene() {
  const auto& objects = scenario_->base.objects;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    boxes_[i] = box_of(objects[i], states_[i]);
    live_[i] = present_[i] && !removed_[i];
    scene_agents_[i].box = boxes_[i];
    scene_agents_[i].speed = states_[i].speed;
    scene_agents_[i].present = live_[i] != 0;
    leaf_boxes_[i] = live_[i] ? Aabb::of_obb(boxes_[i], kAgentBoxMargin) : Aabb::empty();
  }
  if (!agent_bvh_.empty()) agent_bvh_.refit(leaf_boxes_);
}

SceneView World::scene() const {
  return {scene_agents_, road_points_, road_segments_, &agent_bvh_, &segment_bvh_, &point_bvh_};
}

AgentFlags World::agent_flags(std::size_t i) const {
  return {is_controlled_[i] != 0, present_[i] != 0, removed_[i] != 0};
}

EgoContext World::ego_context(std::size_t agent) const {
  const AgentInfo& info = infos_[agent];
  return {agent, scenario_->base.objects[agent].goal, info.veh_collision || info.offroad,
          head_angles_[agent]};
}

void World::observe(std::size_t agent, std::span<double> out) const {
  write_observation(scene(), ego_context(agent), cfg_.obs, out);
}

void World::replay_agent(std::size_t i, std::size_t log_index) {
  const auto& states = scenario_->base.objects[i].states;
  if (states.empty()) {
    present_[i] = 0;
    return;
  }
  const LoggedStep& logged = states[std::min(log_index, states.size() - 1)];
  present_[i] = logged.valid;
  if (logged.valid) states_[i] = logged_state(logged);
}

void World::reset(const WorldOutput& out) {
  if (t_ > 0 || done_) ++episode_;
  init_state();
  sync_scene();
  std::fill(out.rewards.begin(), out.rewards.end(), 0.0);
  write_outputs(out, false);
}

void World::step(std::span<const Action> actions, const WorldOutput& out) {
  if (actions.size() != controlled_.size()) {
    throw EngineError(EngineError::Code::kActionCountMismatch,
                      "world " + std::to_string(world_index_) + " expects " +
                          std::to_string(controlled_.size()) + " actions, got " +
                          std::to_string(actions.size()));
  }
  finished_.reset();
  std::fill(out.rewards.begin(), out.rewards.end(), 0.0);
  if (done_) {
    write_outputs(out, true);
    return;
  }

  const Scenario& base = scenario_->base;
  const double dt = base.timestep;
  for (std::size_t c = 0; c < controlled_.size(); ++c) {
    const std::uint32_t i = controlled_[c];
    if (removed_[i]) continue;
    if (cfg_.dynamics == DynamicsModel::kClassic) {
      states_[i] = step_classic(states_[i], actions[c], dt,
                                {base.objects[i].length, cfg_.v_max}, cfg_.bounds);
    } else {
      states_[i] = step_invertible(states_[i], actions[c], dt, cfg_.v_max, cfg_.bounds);
    }
    head_angles_[i] = std::clamp(head_angles_[i] + actions[c].head_rotation, -kMaxHeadAngle,
                                 kMaxHeadAngle);
  }
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (!is_controlled_[i]) replay_agent(i, t_ + 1);
  }
  ++t_;
  sync_scene();

  detect_collisions(boxes_, live_, edge_sensitive_, agent_bvh_, edges_, edge_bvh_, collisions_);
  std::vector<std::uint8_t> hit(states_.size(), 0);
  for (const auto& [a, b] : collisions_.agent_pairs) {
    infos_[a].veh_collision = infos_[b].veh_collision = 1;
    hit[a] = hit[b] = 1;
  }
  for (const auto& [a, edge] : collisions_.road_edge_hits) {
    infos_[a].offroad = 1;
    hit[a] = 1;
  }

  bool end_episode = false;
  for (std::uint32_t i : controlled_) {
    if (removed_[i] || !hit[i]) continue;
    if (cfg_.collision_behavior == CollisionBehavior::kRemoveAgent) removed_[i] = 1;
    if (cfg_.collision_behavior == CollisionBehavior::kEndEpisode) end_episode = true;
  }
  for (std::size_t c = 0; c < controlled_.size(); ++c) {
    const std::uint32_t i = controlled_[c];
    if (removed_[i]) continue;
    if (end_episode && hit[i]) continue;
    if (distance(states_[i].position, base.objects[i].goal) <= cfg_.goal_tolerance) {
      out.rewards[c] = 1.0;
      infos_[i].goal = 1;
      removed_[i] = 1;
    }
  }
  // Removed agents leave the scene before observations are taken.
  for (std::uint32_t i : controlled_) {
    if (removed_[i]) scene_agents_[i].present = false;
  }

  if (end_episode || t_ >= static_cast<std::size_t>(base.num_steps)) {
    done_ = true;
    finish_episode();
  }
  write_outputs(out, done_);
}

void World::finish_episode() {
  EpisodeRecord record;
  record.scenario = scenario_->base.name;
  record.world = world_index_;
  record.episode = episode_;
  record.outcomes.reserve(controlled_.size());
  for (std::uint32_t i : controlled_) record.outcomes.push_back(infos_[i]);
  finished_ = std::move(record);
}

void World::write_outputs(const WorldOutput& out, bool terminal_step) {
  for (std::size_t c = 0; c < controlled_.size(); ++c) {
    const std::uint32_t i = controlled_[c];
    std::span<double> obs = out.observations.subspan(c * obs_width_, obs_width_);
    if (terminal_step || removed_[i] || !scene_agents_[i].present) {
      std::fill(obs.begin(), obs.end(), 0.0);
    } else {
      write_observation(scene(), ego_context(i), cfg_.obs, obs);
    }
  }
  for (std::size_t i = 0; i < states_.size(); ++i) {
    out.dones[i] = (terminal_step || removed_[i]) ? 1 : 0;
    out.infos[i] = infos_[i];
  }
}

}  // namespace drivesim
