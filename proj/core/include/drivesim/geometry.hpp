#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "drivesim/types.hpp"

namespace drivesim {

struct Pose {
  Vec2 position;
  double heading = 0.0;  // (-pi, pi]

  friend bool operator==(const Pose&, const Pose&) = default;
};

// Oriented bounding box; the footprint of every physical object.
struct Obb {
  Vec2 center;
  double half_length = 0.0;
  double half_width = 0.0;
  double heading = 0.0;

  Vec2 axis_x() const { return unit_vector(heading); }
  Vec2 axis_y() const { return rotate({0.0, 1.0}, heading); }

  // Counter-clockwise, starting at front-left.
  std::array<Vec2, 4> corners() const;

  // Closed-set containment.
  bool contains(Vec2 p, double eps = 0.0) const;
};

struct Segment {
  Vec2 a;
  Vec2 b;
};

struct Ray {
  Vec2 origin;
  Vec2 direction;  // unit length
  double max_range = 0.0;
};

// ---------------------------------------------------------------------------
// Polyline decimation (Visvalingam-Whyatt).

// Area of the triangle (a, b, c).
double triangle_area(Vec2 a, Vec2 b, Vec2 c);

// Repeatedly removes the interior point whose triangle with its current
// neighbours has the smallest area, while that area is below
// `area_threshold`. Ties go to the lower original index. Endpoints are kept
// and the result is a subsequence of `points`.
std::vector<Vec2> decimate_polyline(std::span<const Vec2> points, double area_threshold);

// Same as above but returns the original indices of the surviving points.
std::vector<std::size_t> decimate_polyline_indices(std::span<const Vec2> points,
                                                   double area_threshold);

// ---------------------------------------------------------------------------
// Predicates. Boundary contact counts as intersection everywhere.

bool obb_overlap(const Obb& a, const Obb& b);
bool obb_segment_intersect(const Obb& box, const Segment& seg);

// ---------------------------------------------------------------------------
// Ray casting.

struct EntityRef {
  enum class Kind : std::uint8_t { kBox = 0, kSegment = 1 };
  Kind kind = Kind::kBox;
  std::uint32_t index = 0;

  friend auto operator<=>(const EntityRef&, const EntityRef&) = default;
};

struct Hit {
  double distance = 0.0;
  EntityRef target;
};

// Parametric distance along the ray to the first contact, if within range.
// A ray starting inside (or on) the box reports distance 0.
std::optional<double> ray_segment_distance(const Ray& ray, const Segment& seg);
std::optional<double> ray_obb_distance(const Ray& ray, const Obb& box);

// Nearest hit over all primitives. Equal distances resolve to the smaller
// EntityRef (boxes before segments, then by index).
std::optional<Hit> ray_cast(const Ray& ray, std::span<const Obb> boxes,
                            std::span<const Segment> segments);

// Keeps whichever of `best` and `candidate` comes first in the (distance, ref)
// order used by ray_cast.
inline void keep_nearer(std::optional<Hit>& best, const Hit& candidate) {
  if (!best || candidate.distance < best->distance ||
      (candidate.distance == best->distance && candidate.target < best->target)) {
    best = candidate;
  }
}

// ---------------------------------------------------------------------------
// Ego-frame transforms.

Vec2 to_ego_frame(Vec2 point, const Pose& ego);
Vec2 from_ego_frame(Vec2 point, const Pose& ego);
Pose to_ego_frame(const Pose& target, const Pose& ego);
Pose from_ego_frame(const Pose& target, const Pose& ego);

}  // namespace drivesim
