#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drivesim/bvh.hpp"
#include "drivesim/geometry.hpp"
#include "drivesim/scenario.hpp"

namespace drivesim {

enum class ObsMode : std::uint8_t { kRadial, kLidar, kViewCone };

std::string_view to_string(ObsMode mode);
std::optional<ObsMode> parse_obs_mode(std::string_view name);

struct ObsConfig {
  ObsMode mode = ObsMode::kRadial;
  double radius = 50.0;          // radial filter, meters
  std::size_t n_rays = 64;
  double fov = 2.0 * kPi / 3.0;  // view cone, radians
  double max_range = 100.0;      // ray length, meters
  std::size_t max_agents_obs = 16;
  std::size_t max_road_points_obs = 64;
};

// Lidar hit classes, in one-hot order.
enum class HitClass : std::uint8_t { kAgent = 0, kRoadEdge = 1, kOtherRoad = 2, kNone = 3 };
inline constexpr std::size_t kNumHitClasses = 4;

// Flat observation vector layout. Every observation for a given ObsConfig
// has exactly `width` doubles:
//
//   ego      [speed, length, width, goal_x, goal_y, goal_distance, collided]
//   radial:  max_agents_obs partner slots
//              [x, y, heading, speed_delta, length, width, valid]
//            max_road_points_obs road slots
//              [x, y, heading, one_hot(7 road kinds), valid]
//   lidar / view cone: n_rays ray slots
//              [distance, one_hot(agent, road_edge, other_road, none)]
//
// Positions and headings are in the ego frame; invalid slots are all zero.
struct ObsLayout {
  static constexpr std::size_t kEgoWidth = 7;
  static constexpr std::size_t kPartnerWidth = 7;
  static constexpr std::size_t kRoadWidth = 3 + kNumRoadKinds + 1;
  static constexpr std::size_t kRayWidth = 1 + kNumHitClasses;

  std::size_t partner_offset = 0;
  std::size_t partner_slots = 0;
  std::size_t road_offset = 0;
  std::size_t road_slots = 0;
  std::size_t ray_offset = 0;
  std::size_t ray_slots = 0;
  std::size_t width = 0;

  // Machine-readable description: field names, offsets, widths.
  std::string to_json() const;
};

ObsLayout obs_layout(const ObsConfig& cfg);

// Read-only snapshot of one world, as seen by the sensors.
struct SceneAgent {
  std::int64_t id = 0;
  ObjectKind kind = ObjectKind::kVehicle;
  Obb box;
  double speed = 0.0;
  bool present = false;  // physically in the scene (alive, valid this step)
};

struct RoadPoint {
  Vec2 position;
  double heading = 0.0;  // direction of the adjoining segment
  RoadKind kind = RoadKind::kRoadEdge;
  bool has_heading = true;  // false for single-point elements
  std::int64_t road_id = 0;
  std::uint32_t index = 0;  // position within its polyline
};

struct RoadSegment {
  Segment seg;
  RoadKind kind = RoadKind::kRoadEdge;
};

// Flattens decimated road elements into sensor primitives. Points keep
// element order; segments join consecutive points of each element.
std::vector<RoadPoint> build_road_points(std::span<const RoadElement> roads);
std::vector<RoadSegment> build_road_segments(std::span<const RoadElement> roads);

struct SceneView {
  std::span<const SceneAgent> agents;
  std::span<const RoadPoint> road_points;
  std::span<const RoadSegment> road_segments;
  const Bvh* agent_bvh = nullptr;    // refs: agent indices
  const Bvh* segment_bvh = nullptr;  // refs: road_segments indices
  const Bvh* point_bvh = nullptr;    // refs: road_points indices
};

struct EgoContext {
  std::size_t agent = 0;
  Vec2 goal;
  bool collided = false;
  double head_angle = 0.0;  // view cone only
};

class ObservationError : public Error {
 public:
  using Error::Error;
};

// Each writer fills `out` (size obs_layout(cfg).width) and throws
// ObservationError if the ego agent is not present.
void write_radial_obs(const SceneView& scene, const EgoContext& ego, const ObsConfig& cfg,
                      std::span<double> out);
void write_lidar_obs(const SceneView& scene, const EgoContext& ego, const ObsConfig& cfg,
                     std::span<double> out);
void write_view_cone_obs(const SceneView& scene, const EgoContext& ego, const ObsConfig& cfg,
                         std::span<double> out);

// Dispatches on cfg.mode.
void write_observation(const SceneView& scene, const EgoContext& ego, const ObsConfig& cfg,
                       std::span<double> out);

// World-frame ray directions used by the lidar and view cone modes.
std::vector<double> lidar_ray_angles(double ego_heading, std::size_t n_rays);
std::vector<double> view_cone_ray_angles(double ego_heading, double head_angle, double fov,
                                         std::size_t n_rays);

inline constexpr double kMaxHeadAngle = kPi / 2.0;

// Result of one accelerated ray query; `target` is an agent index for
// kAgent hits and a road segment index otherwise.
struct RayResult {
  double distance = 0.0;
  HitClass hit = HitClass::kNone;
  std::uint32_t target = 0;
};

RayResult cast_scene_ray(const SceneView& scene, std::size_t ego_agent, const Ray& ray);

}  // namespace drivesim
