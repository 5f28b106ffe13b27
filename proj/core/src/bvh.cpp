#include "drivesim/bvh.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace drivesim {

Aabb Aabb::empty() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {{inf, inf}, {-inf, -inf}};
}

Aabb Aabb::of_segment(const Segment& s) {
  return {{std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y)},
          {std::max(s.a.x, s.b.x), std::max(s.a.y, s.b.y)}};
}

Aabb Aabb::of_obb(const Obb& box, double margin) {
  // Half extents of a rotated rectangle.
  const double c = std::abs(std::cos(box.heading));
  const double s = std::abs(std::sin(box.heading));
  const double ex = box.half_length * c + box.half_width * s + margin;
  const double ey = box.half_length * s + box.half_width * c + margin;
  return {{box.center.x - ex, box.center.y - ey}, {box.center.x + ex, box.center.y + ey}};
}

Aabb& Aabb::expand(const Aabb& o) {
  min.x = std::min(min.x, o.min.x);
  min.y = std::min(min.y, o.min.y);
  max.x = std::max(max.x, o.max.x);
  max.y = std::max(max.y, o.max.y);
  return *this;
}

Aabb Aabb::inflated(double margin) const {
  return {{min.x - margin, min.y - margin}, {max.x + margin, max.y + margin}};
}

bool Aabb::hit_by(const Ray& ray) const {
  if (min.x > max.x || min.y > max.y) return false;
  double t_enter = 0.0;
  double t_exit = ray.max_range;
  const double o[2] = {ray.origin.x, ray.origin.y};
  const double d[2] = {ray.direction.x, ray.direction.y};
  const double lo[2] = {min.x, min.y};
  const double hi[2] = {max.x, max.y};
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      if (o[axis] < lo[axis] || o[axis] > hi[axis]) return false;
      continue;
    }
    const double inv = 1.0 / d[axis];
    double t1 = (lo[axis] - o[axis]) * inv;
    double t2 = (hi[axis] - o[axis]) * inv;
    if (t1 > t2) std::swap(t1, t2);
    t_enter = std::max(t_enter, t1);
    t_exit = std::min(t_exit, t2);
    if (t_enter > t_exit) return false;
  }
  return true;
}

namespace {

// Descend into the larger node first.
double half_perimeter(const Aabb& b) { return (b.max.x - b.min.x) + (b.max.y - b.min.y); }

}  // namespace

Aabb merge(const Aabb& a, const Aabb& b) {
  Aabb out = a;
  return out.expand(b);
}

Bvh Bvh::build(std::span<const Entity> entities) {
  if (entities.empty()) {
    throw BvhError(BvhError::Code::kEmptyInput, "cannot build a BVH over zero entities");
  }
  Bvh bvh;
  const std::size_t n = entities.size();
  bvh.nodes_.reserve(2 * n - 1);
  bvh.leaf_refs_.resize(n);
  bvh.leaf_node_.resize(n);
  for (std::size_t i = 0; i < n; ++i) bvh.leaf_refs_[i] = entities[i].ref;

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  bvh.build_range(entities, order, 0, n);
  return bvh;
}

std::int32_t Bvh::build_range(std::span<const Entity> entities, std::vector<std::uint32_t>& order,
                              std::size_t begin, std::size_t end) {
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();

  if (end - begin == 1) {
    const std::uint32_t slot = order[begin];
    nodes_[index].box = entities[slot].box;
    nodes_[index].right = static_cast<std::int32_t>(slot);
    leaf_node_[slot] = index;
    return index;
  }

  Aabb centroids = Aabb::empty();
  for (std::size_t i = begin; i < end; ++i) {
    centroids.expand(Aabb::of_point(entities[order[i]].box.centroid()));
  }
  const bool split_x = (centroids.max.x - centroids.min.x) >= (centroids.max.y - centroids.min.y);
  auto key = [&](std::uint32_t slot) {
    const Vec2 c = entities[slot].box.centroid();
    return split_x ? c.x : c.y;
  };
  // Total order (coordinate, slot) makes each half's membership unique.
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(begin),
                   order.begin() + static_cast<std::ptrdiff_t>(mid),
                   order.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double ka = key(a);
                     const double kb = key(b);
                     return ka < kb || (ka == kb && a < b);
                   });
  // Canonical order inside each half keeps recursion independent of the
  // standard library's nth_element strategy.
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
            order.begin() + static_cast<std::ptrdiff_t>(mid));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(mid),
            order.begin() + static_cast<std::ptrdiff_t>(end));

  const std::int32_t left = build_range(entities, order, begin, mid);
  const std::int32_t right = build_range(entities, order, mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  nodes_[index].box = merge(nodes_[left].box, nodes_[right].box);
  return index;
}

void Bvh::refit(std::span<const Aabb> boxes) {
  if (boxes.size() != leaf_refs_.size()) {
    throw BvhError(BvhError::Code::kLengthMismatch,
                   "refit expects " + std::to_string(leaf_refs_.size()) + " boxes, got " +
                       std::to_string(boxes.size()));
  }
  for (std::size_t slot = 0; slot < boxes.size(); ++slot) {
    nodes_[leaf_node_[slot]].box = boxes[slot];
  }
  // Children always follow their parent in node order.
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.is_leaf()) node.box = merge(nodes_[node.left].box, nodes_[node.right].box);
  }
}

std::vector<Bvh::RefPair> Bvh::query_pairs() const {
  std::vector<RefPair> out;
  query_pairs(out);
  return out;
}

void Bvh::query_pairs(std::vector<RefPair>& out) const {
  if (nodes_.empty()) return;
  // Every internal node contributes the pairs that straddle its children.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    if (!node.is_leaf()) self_pairs(node.left, node.right, out);
  }
}

void Bvh::self_pairs(std::int32_t a, std::int32_t b, std::vector<RefPair>& out) const {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  if (!na.box.overlaps(nb.box)) return;
  if (na.is_leaf() && nb.is_leaf()) {
    const Ref ra = leaf_refs_[na.right];
    const Ref rb = leaf_refs_[nb.right];
    out.emplace_back(std::min(ra, rb), std::max(ra, rb));
    return;
  }
  if (nb.is_leaf() || (!na.is_leaf() && half_perimeter(na.box) >= half_perimeter(nb.box))) {
    self_pairs(na.left, b, out);
    self_pairs(na.right, b, out);
  } else {
    self_pairs(a, nb.left, out);
    self_pairs(a, nb.right, out);
  }
}

void Bvh::query_pairs(const Bvh& other, std::vector<RefPair>& out) const {
  if (nodes_.empty() || other.nodes_.empty()) return;
  cross_pairs(0, other, 0, out);
}

void Bvh::cross_pairs(std::int32_t a, const Bvh& other, std::int32_t b,
                      std::vector<RefPair>& out) const {
  const Node& na = nodes_[a];
  const Node& nb = other.nodes_[b];
  if (!na.box.overlaps(nb.box)) return;
  if (na.is_leaf() && nb.is_leaf()) {
    out.emplace_back(leaf_refs_[na.right], other.leaf_refs_[nb.right]);
    return;
  }
  if (nb.is_leaf() || (!na.is_leaf() && half_perimeter(na.box) >= half_perimeter(nb.box))) {
    cross_pairs(na.left, other, b, out);
    cross_pairs(na.right, other, b, out);
  } else {
    cross_pairs(a, other, nb.left, out);
    cross_pairs(a, other, nb.right, out);
  }
}

std::vector<Bvh::Ref> Bvh::query_ray(const Ray& ray) const {
  std::vector<Ref> out;
  query_ray(ray, [&](Ref r) { out.push_back(r); });
  return out;
}

}  // namespace drivesim
