#include "drivesim/observation.hpp"

#include <algorithm>
#include <array>

#include "json.hpp"

namespace drivesim {

namespace {

constexpr std::array<std::string_view, 3> kModeNames = {"radial", "lidar", "view_cone"};

const SceneAgent& ego_agent(const SceneView& scene, const EgoContext& ego) {
  if (ego.agent >= scene.agents.size() || !scene.agents[ego.agent].present) {
    throw ObservationError("agent is not alive", "agent " + std::to_string(ego.agent));
  }
  return scene.agents[ego.agent];
}

void check_width(const ObsConfig& cfg, std::span<double> out) {
  if (out.size() != obs_layout(cfg).width) {
    throw ObservationError("output buffer has " + std::to_string(out.size()) +
                           " values, layout needs " + std::to_string(obs_layout(cfg).width));
  }
}

void write_ego(const SceneAgent& agent, const EgoContext& ego, std::span<double> out) {
  const Pose pose{agent.box.center, agent.box.heading};
  const Vec2 goal = to_ego_frame(ego.goal, pose);
  out[0] = agent.speed;
  out[1] = 2.0 * agent.box.half_length;
  out[2] = 2.0 * agent.box.half_width;
  out[3] = goal.x;
  out[4] = goal.y;
  out[5] = norm(goal);
  out[6] = ego.collided ? 1.0 : 0.0;
}

void write_rays(const SceneView& scene, const EgoContext& ego, const ObsConfig& cfg,
                std::span<const double> angles, std::span<double> out) {
  const SceneAgent& agent = scene.agents[ego.agent];
  const ObsLayout layout = obs_layout(cfg);
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const Ray ray{agent.box.center, unit_vector(angles[k]), cfg.max_range};
    const RayResult r = cast_scene_ray(scene, ego.agent, ray);
    double* slot = out.data() + layout.ray_offset + k * ObsLayout::kRayWidth;
    slot[0] = r.distance;
    slot[1 + static_cast<std::size_t>(r.hit)] = 1.0;
  }
}

}  // namespace

std::string_view to_string(ObsMode mode) { return kModeNames[static_cast<std::size_t>(mode)]; }

std::optional<ObsMode> parse_obs_mode(std::string_view name) {
  for (std::size_t i = 0; i < kModeNames.size(); ++i) {
    if (kModeNames[i] == name) return static_cast<ObsMode>(i);
  }
  return std::nullopt;
}

ObsLayout obs_layout(const ObsConfig& cfg) {
  ObsLayout l;
  std::size_t offset = ObsLayout::kEgoWidth;
  if (cfg.mode == ObsMode::kRadial) {
    l.partner_offset = offset;
    l.partner_slots = cfg.max_agents_obs;
    offset += l.partner_slots * ObsLayout::kPartnerWidth;
    l.road_offset = offset;
    l.road_slots = cfg.max_road_points_obs;
    offset += l.road_slots * ObsLayout::kRoadWidth;
    l.ray_offset = offset;
  } else {
    l.partner_offset = l.road_offset = l.ray_offset = offset;
    l.ray_slots = cfg.n_rays;
    offset += l.ray_slots * ObsLayout::kRayWidth;
  }
  l.width = offset;
  return l;
}

std::string ObsLayout::to_json() const {
  using nlohmann::json;
  auto block = [](std::size_t offset, std::size_t slots, std::size_t slot_width,
                  std::initializer_list<std::string_view> fields) {
    json names = json::array();
    for (std::string_view f : fields) names.push_back(f);
    return json{{"offset", offset}, {"slots", slots}, {"slot_width", slot_width}, {"fields", names}};
  };
  json doc;
  doc["width"] = width;
  doc["ego"] = block(0, 1, kEgoWidth,
                     {"speed", "length", "width", "goal_x", "goal_y", "goal_distance", "collided"});
  doc["partners"] = block(partner_offset, partner_slots, kPartnerWidth,
                          {"x", "y", "heading", "speed_delta", "length", "width", "valid"});
  doc["road_points"] = block(road_offset, road_slots, kRoadWidth,
                             {"x", "y", "heading", "road_edge", "lane", "road_line", "crosswalk",
                              "speed_bump", "stop_sign", "driveway", "valid"});
  doc["rays"] = block(ray_offset, ray_slots, kRayWidth,
                      {"distance", "agent", "road_edge", "other_road", "none"});
  return doc.dump();
}

std::vector<RoadPoint> build_road_points(std::span<const RoadElement> roads) {
  std::vector<RoadPoint> points;
  for (const RoadElement& road : roads) {
    const auto& g = road.geometry;
    for (std::size_t k = 0; k < g.size(); ++k) {
      RoadPoint p;
      p.position = g[k];
      p.kind = road.kind;
      p.road_id = road.id;
      p.index = static_cast<std::uint32_t>(k);
      if (g.size() < 2) {
        p.has_heading = false;
      } else {
        const Vec2 d = k + 1 < g.size() ? g[k + 1] - g[k] : g[k] - g[k - 1];
        p.heading = std::atan2(d.y, d.x);
      }
      points.push_back(p);
    }
  }
  return points;
}

std::vector<RoadSegment> build_road_segments(std::span<const RoadElement> roads) {
  std::vector<RoadSegment> segments;
  for (const RoadElement& road : roads) {
    for (std::size_t k = 0; k + 1 < road.geometry.size(); ++k) {
      segments.push_back({{road.geometry[k], road.geometry[k + 1]}, road.kind});
    }
  }
  return segments;
}

std::vector<double> lidar_ray_angles(double ego_heading, std::size_t n_rays) {
  std::vector<double> angles(n_rays);
  for (std::size_t k = 0; k < n_rays; ++k) {
    angles[k] = ego_heading + kTwoPi * static_cast<double>(k) / static_cast<double>(n_rays);
  }
  return angles;
}

std::vector<double> view_cone_ray_angles(double ego_heading, double head_angle, double fov,
                                         std::size_t n_rays) {
  const double center = ego_heading + std::clamp(head_angle, -kMaxHeadAngle, kMaxHeadAngle);
  // A full circle would put the first and last ray on top of each other.
  if (fov >= kTwoPi) return lidar_ray_angles(center, n_rays);
  std::vector<double> angles(n_rays);
  if (n_rays == 1) {
    angles[0] = center;
    return angles;
  }
  for (std::size_t k = 0; k < n_rays; ++k) {
    angles[k] = center - 0.5 * fov + fov * static_cast<double>(k) / static_cast<double>(n_rays - 1);
  }
  return angles;
}

RayResult cast_scene_ray(const SceneView& scene, std::size_t ego_agent, const Ray& ray) {
  std::optional<Hit> best;
  if (scene.agent_bvh != nullptr) {
    scene.agent_bvh->query_ray(ray, [&](Bvh::Ref ref) {
      if (ref == ego_agent || !scene.agents[ref].present) return;
      if (auto d = ray_obb_distance(ray, scene.agents[ref].box)) {
        keep_nearer(best, {*d, {EntityRef::Kind::kBox, ref}});
      }
    });
  }
  if (scene.segment_bvh != nullptr) {
    scene.segment_bvh->query_ray(ray, [&](Bvh::Ref ref) {
      if (auto d = ray_segment_distance(ray, scene.road_segments[ref].seg)) {
        keep_nearer(best, {*d, {EntityRef::Kind::kSegment, ref}});
      }
    });
  }
  if (!best) return {ray.max_range, HitClass::kNone, 0};
  HitClass hit = HitClass::kAgent;
  if (best->target.kind == EntityRef::Kind::kSegment) {
    hit = scene.road_segments[best->target.index].kind == RoadKind::kRoadEdge
              ? HitClass::kRoadEdge
              : HitClass::kOtherRoad;
  }
  return {best->distance, hit, best->target.index};
}

void write_radial_obs(const SceneView& scene, const EgoContext& ego, const ObsConfig& cfg,
                      std::span<double> out) {
  check_width(cfg, out);
  const SceneAgent& agent = ego_agent(scene, ego);
  std::fill(out.begin(), out.end(), 0.0);
  write_ego(agent, ego, out);

  const ObsLayout layout = obs_layout(cfg);
  const Pose pose{agent.box.center, agent.box.heading};
  const double r2 = cfg.radius * cfg.radius;
  const Aabb window{pose.position - Vec2{cfg.radius, cfg.radius},
                    pose.position + Vec2{cfg.radius, cfg.radius}};

  struct Candidate {
    double d2;
    std::int64_t id;
    std::uint32_t index;  // road point index within its element, 0 for agents
    std::uint32_t ref;
    bool operator<(const Candidate& o) const {
      if (d2 != o.d2) return d2 < o.d2;
      if (id != o.id) return id < o.id;
      return index < o.index;
    }
  };
  std::vector<Candidate> found;

  auto take_nearest = [&](std::size_t cap) {
    const std::size_t n = std::min(cap, found.size());
    std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(n), found.end());
    found.resize(n);
  };

  auto consider_agent = [&](std::uint32_t i) {
    if (i == ego.agent || !scene.agents[i].present) return;
    const double d2 = squared_norm(scene.agents[i].box.center - pose.position);
    if (d2 <= r2) found.push_back({d2, scene.agents[i].id, 0, i});
  };
  if (scene.agent_bvh != nullptr) {
    scene.agent_bvh->query_box(window, consider_agent);
  } else {
    for (std::uint32_t i = 0; i < scene.agents.size(); ++i) consider_agent(i);
  }
  take_nearest(cfg.max_agents_obs);
  for (std::size_t s = 0; s < found.size(); ++s) {
    const SceneAgent& other = scene.agents[found[s].ref];
    const Pose rel = to_ego_frame(Pose{other.box.center, other.box.heading}, pose);
    double* slot = out.data() + layout.partner_offset + s * ObsLayout::kPartnerWidth;
    slot[0] = rel.position.x;
    slot[1] = rel.position.y;
    slot[2] = rel.heading;
    slot[3] = other.speed - agent.speed;
    slot[4] = 2.0 * other.box.half_length;
    slot[5] = 2.0 * other.box.half_width;
    slot[6] = 1.0;
  }

  found.clear();
  auto consider_point = [&](std::uint32_t i) {
    const RoadPoint& p = scene.road_points[i];
    const double d2 = squared_norm(p.position - pose.position);
    if (d2 <= r2) found.push_back({d2, p.road_id, p.index, i});
  };
  if (scene.point_bvh != nullptr) {
    scene.point_bvh->query_box(window, consider_point);
  } else {
    for (std::uint32_t i = 0; i < scene.road_points.size(); ++i) consider_point(i);
  }
  take_nearest(cfg.max_road_points_obs);
  for (std::size_t s = 0; s < found.size(); ++s) {
    const RoadPoint& p = scene.road_points[found[s].ref];
    double* slot = out.data() + layout.road_offset + s * ObsLayout::kRoadWidth;
    const Vec2 rel = to_ego_frame(p.position, pose);
    slot[0] = rel.x;
    slot[1] = rel.y;
    slot[2] = p.has_heading ? angle_diff(p.heading, pose.heading) : 0.0;
    slot[3 + static_cast<std::size_t>(p.kind)] = 1.0;
    slot[ObsLayout::kRoadWidth - 1] = 1.0;
  }
}

void write_lidar_obs(const SceneView& scene, const EgoContext& ego, const ObsConfig& cfg,
                     std::span<double> out) {
  check_width(cfg, out);
  const SceneAgent& agent = ego_agent(scene, ego);
  std::fill(out.begin(), out.end(), 0.0);
  write_ego(agent, ego, out);
  write_rays(scene, ego, cfg, lidar_ray_angles(agent.box.heading, cfg.n_rays), out);
}

void write_view_cone_obs(const SceneView& scene, const EgoContext& ego, const ObsConfig& cfg,
                         std::span<double> out) {
  check_width(cfg, out);
  const SceneAgent& agent = ego_agent(scene, ego);
  std::fill(out.begin(), out.end(), 0.0);
  write_ego(agent, ego, out);
  write_rays(scene, ego, cfg,
             view_cone_ray_angles(agent.box.heading, ego.head_angle, cfg.fov, cfg.n_rays), out);
}

void write_observation(const SceneView& scene, const EgoContext& ego, const ObsConfig& cfg,
                       std::span<double> out) {
  switch (cfg.mode) {
    case ObsMode::kRadial: write_radial_obs(scene, ego, cfg, out); return;
    case ObsMode::kLidar: write_lidar_obs(scene, ego, cfg, out); return;
    case ObsMode::kViewCone: write_view_cone_obs(scene, ego, cfg, out); return;
  }
}

}  // namespace drivesim
