#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "drivesim/geometry.hpp"

namespace drivesim {

struct Aabb {
  Vec2 min;
  Vec2 max;

  static Aabb empty();
  static Aabb of_point(Vec2 p) { return {p, p}; }
  static Aabb of_segment(const Segment& s);
  static Aabb of_obb(const Obb& box, double margin = 0.0);

  Aabb& expand(const Aabb& o);
  Aabb inflated(double margin) const;
  Vec2 centroid() const { return (min + max) * 0.5; }

  // Touching boxes overlap.
  bool overlaps(const Aabb& o) const {
    return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y;
  }
  bool contains(const Aabb& o) const {
    return min.x <= o.min.x && min.y <= o.min.y && o.max.x <= max.x && o.max.y <= max.y;
  }
  // Whether the ray meets the box for some t in [0, max_range].
  bool hit_by(const Ray& ray) const;

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

Aabb merge(const Aabb& a, const Aabb& b);

class BvhError : public Error {
 public:
  enum class Code { kEmptyInput, kLengthMismatch };
  BvhError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

// Binary bounding volume hierarchy with one entity per leaf. Topology is
// fixed at build time; leaf bounds can be refreshed with refit().
class Bvh {
 public:
  using Ref = std::uint32_t;
  using RefPair = std::pair<Ref, Ref>;

  struct Node {
    Aabb box;
    // Internal nodes: children. Leaves: left == -1, right holds the leaf slot.
    std::int32_t left = -1;
    std::int32_t right = -1;
    bool is_leaf() const { return left < 0; }
  };

  struct Entity {
    Ref ref;
    Aabb box;
  };

  Bvh() = default;

  // Median split over the longer axis of the centroid bounds. Deterministic
  // for a fixed input order. Throws BvhError{kEmptyInput}.
  static Bvh build(std::span<const Entity> entities);

  // Replaces leaf bounds (in build input order) and recomputes internal
  // bounds bottom-up. Throws BvhError{kLengthMismatch}.
  void refit(std::span<const Aabb> boxes);

  // All unordered leaf pairs with overlapping boxes, each as (min, max) ref.
  // Order is traversal order; sort for a canonical form.
  std::vector<RefPair> query_pairs() const;
  void query_pairs(std::vector<RefPair>& out) const;

  // Pairs (ref in this, ref in other) with overlapping boxes.
  void query_pairs(const Bvh& other, std::vector<RefPair>& out) const;

  // Refs whose leaf box overlaps `box`.
  template <typename Fn>
  void query_box(const Aabb& box, Fn&& fn) const;

  std::vector<Ref> query_ray(const Ray& ray) const;
  template <typename Fn>
  void query_ray(const Ray& ray, Fn&& fn) const;

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return leaf_refs_.size(); }
  std::span<const Node> nodes() const { return nodes_; }
  const Aabb& root_box() const { return nodes_.front().box; }
  // Refs in build input order.
  std::span<const Ref> refs() const { return leaf_refs_; }
  const Aabb& leaf_box(std::size_t slot) const { return nodes_[leaf_node_[slot]].box; }

 private:
  std::int32_t build_range(std::span<const Entity> entities, std::vector<std::uint32_t>& order,
                           std::size_t begin, std::size_t end);
  void self_pairs(std::int32_t a, std::int32_t b, std::vector<RefPair>& out) const;
  void cross_pairs(std::int32_t a, const Bvh& other, std::int32_t b,
                   std::vector<RefPair>& out) const;

  std::vector<Node> nodes_;
  std::vector<Ref> leaf_refs_;            // slot -> ref
  std::vector<std::int32_t> leaf_node_;   // slot -> node index
};

template <typename Fn>
void Bvh::query_box(const Aabb& box, Fn&& fn) const {
  if (nodes_.empty()) return;
  std::int32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!node.box.overlaps(box)) continue;
    if (node.is_leaf()) {
      fn(leaf_refs_[node.right]);
    } else {
      stack[top++] = node.right;
      stack[top++] = node.left;
    }
  }
}

template <typename Fn>
void Bvh::query_ray(const Ray& ray, Fn&& fn) const {
  if (nodes_.empty()) return;
  std::int32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!node.box.hit_by(ray)) continue;
    if (node.is_leaf()) {
      fn(leaf_refs_[node.right]);
    } else {
      stack[top++] = node.right;
      stack[top++] = node.left;
    }
  }
}

}  // namespace drivesim
