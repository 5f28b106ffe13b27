#include "drivesim/geometry.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <utility>

namespace drivesim {

std::array<Vec2, 4> Obb::corners() const {
  const Vec2 ex = axis_x() * half_length;
  const Vec2 ey = axis_y() * half_width;
  return {center + ex + ey, center - ex + ey, center - ex - ey, center + ex - ey};
}

bool Obb::contains(Vec2 p, double eps) const {
  const Vec2 local = rotate(p - center, -heading);
  return std::abs(local.x) <= half_length + eps && std::abs(local.y) <= half_width + eps;
}

double triangle_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * std::abs(cross(b - a, c - a)); }

std::vector<std::size_t> decimate_polyline_indices(std::span<const Vec2> points,
                                                   double area_threshold) {
  const std::size_t n = points.size();
  std::vector<std::size_t> out;
  if (n <= 2) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
  }

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> prev(n), next(n);
  std::vector<double> area(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = i == 0 ? kNone : i - 1;
    next[i] = i + 1 == n ? kNone : i + 1;
  }

  // Ordered by (area, index): begin() is the next removal candidate.
  std::set<std::pair<double, std::size_t>> queue;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    area[i] = triangle_area(points[i - 1], points[i], points[i + 1]);
    queue.emplace(area[i], i);
  }

  std::vector<bool> removed(n, false);
  while (!queue.empty()) {
    const auto [min_area, idx] = *queue.begin();
    if (!(min_area < area_threshold)) break;
    queue.erase(queue.begin());
    removed[idx] = true;

    const std::size_t p = prev[idx];
    const std::size_t q = next[idx];
    next[p] = q;
    prev[q] = p;

    for (const std::size_t k : {p, q}) {
      if (prev[k] == kNone || next[k] == kNone) continue;  // endpoint
      queue.erase({area[k], k});
      area[k] = triangle_area(points[prev[k]], points[k], points[next[k]]);
      queue.emplace(area[k], k);
    }
  }

  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) out.push_back(i);
  }
  return out;
}

std::vector<Vec2> decimate_polyline(std::span<const Vec2> points, double area_threshold) {
  const auto keep = decimate_polyline_indices(points, area_threshold);
  std::vector<Vec2> out;
  out.reserve(keep.size());
  for (const std::size_t i : keep) out.push_back(points[i]);
  return out;
}

namespace {

// Radius of the box's projection onto a unit `axis`.
double projected_radius(const Obb& box, Vec2 axis) {
  return box.half_length * std::abs(dot(box.axis_x(), axis)) +
         box.half_width * std::abs(dot(box.axis_y(), axis));
}

}  // namespace

bool obb_overlap(const Obb& a, const Obb& b) {
  const Vec2 offset = b.center - a.center;
  const std::array<Vec2, 4> axes = {a.axis_x(), a.axis_y(), b.axis_x(), b.axis_y()};
  for (const Vec2& axis : axes) {
    const double gap = std::abs(dot(offset, axis));
    if (gap > projected_radius(a, axis) + projected_radius(b, axis)) return false;
  }
  return true;
}

bool obb_segment_intersect(const Obb& box, const Segment& seg) {
  const Vec2 pa = seg.a - box.center;
  const Vec2 pb = seg.b - box.center;

  const std::array<std::pair<Vec2, double>, 2> box_axes = {
      std::pair{box.axis_x(), box.half_length}, std::pair{box.axis_y(), box.half_width}};
  for (const auto& [axis, half] : box_axes) {
    const double sa = dot(pa, axis);
    const double sb = dot(pb, axis);
    if (std::min(sa, sb) > half || std::max(sa, sb) < -half) return false;
  }

  const Vec2 dir = seg.b - seg.a;
  const double len = norm(dir);
  if (len > 0.0) {
    const Vec2 normal{-dir.y / len, dir.x / len};
    if (std::abs(dot(pa, normal)) > projected_radius(box, normal)) return false;
  }
  return true;
}

std::optional<double> ray_segment_distance(const Ray& ray, const Segment& seg) {
  const Vec2 d = ray.direction;
  const Vec2 e = seg.b - seg.a;
  const Vec2 w = seg.a - ray.origin;
  const double denom = cross(d, e);

  if (denom != 0.0) {
    const double t = cross(w, e) / denom;
    const double u = cross(w, d) / denom;
    if (t < 0.0 || t > ray.max_range || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
  }

  // Parallel: only a collinear segment can be hit.
  if (cross(w, d) != 0.0) return std::nullopt;
  const double ta = dot(seg.a - ray.origin, d);
  const double tb = dot(seg.b - ray.origin, d);
  const double lo = std::min(ta, tb);
  const double hi = std::max(ta, tb);
  if (hi < 0.0) return std::nullopt;
  const double t = lo <= 0.0 ? 0.0 : lo;
  if (t > ray.max_range) return std::nullopt;
  return t;
}

std::optional<double> ray_obb_distance(const Ray& ray, const Obb& box) {
  const Vec2 origin = rotate(ray.origin - box.center, -box.heading);
  const Vec2 dir = rotate(ray.direction, -box.heading);

  double t_enter = 0.0;
  double t_exit = ray.max_range;
  const std::array<std::array<double, 3>, 2> slabs = {
      std::array{origin.x, dir.x, box.half_length}, std::array{origin.y, dir.y, box.half_width}};
  for (const auto& [p, v, half] : slabs) {
    if (v == 0.0) {
      if (std::abs(p) > half) return std::nullopt;
      continue;
    }
    double t1 = (-half - p) / v;
    double t2 = (half - p) / v;
    if (t1 > t2) std::swap(t1, t2);
    t_enter = std::max(t_enter, t1);
    t_exit = std::min(t_exit, t2);
    if (t_enter > t_exit) return std::nullopt;
  }
  return t_enter;
}

std::optional<Hit> ray_cast(const Ray& ray, std::span<const Obb> boxes,
                            std::span<const Segment> segments) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (const auto t = ray_obb_distance(ray, boxes[i])) {
      keep_nearer(best, {*t, {EntityRef::Kind::kBox, static_cast<std::uint32_t>(i)}});
    }
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (const auto t = ray_segment_distance(ray, segments[i])) {
      keep_nearer(best, {*t, {EntityRef::Kind::kSegment, static_cast<std::uint32_t>(i)}});
    }
  }
  return best;
}

Vec2 to_ego_frame(Vec2 point, const Pose& ego) {
  return rotate(point - ego.position, -ego.heading);
}

Vec2 from_ego_frame(Vec2 point, const Pose& ego) {
  return ego.position + rotate(point, ego.heading);
}

Pose to_ego_frame(const Pose& target, const Pose& ego) {
  return {to_ego_frame(target.position, ego), normalize_angle(target.heading - ego.heading)};
}

Pose from_ego_frame(const Pose& target, const Pose& ego) {
  return {from_ego_frame(target.position, ego), normalize_angle(target.heading + ego.heading)};
}

}  // namespace drivesim
