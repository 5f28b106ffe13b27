#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "drivesim/scenario.hpp"

namespace drivesim {

enum class MapTemplate { kStraightRoad, kIntersection, kParkingLot };

std::string_view to_string(MapTemplate t);
std::optional<MapTemplate> parse_map_template(std::string_view name);

struct SyntheticSpec {
  MapTemplate map = MapTemplate::kStraightRoad;
  std::size_t n_agents = 1;
  std::uint64_t seed = 0;
  double timestep = 0.1;
  int num_steps = 91;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// Maximum number of agents a template can place without overlap.
std::size_t template_capacity(MapTemplate t);

// Deterministic per spec. Every log is produced by stepping the classic
// bicycle model, so it is dynamically feasible, and every goal is the final
// logged position. Throws InvalidSpec when n_agents is 0 or exceeds the
// template capacity.
//
//   straight_road  four +x lanes between two road edges; goals 40 m ahead
//   intersection   four-way crossing; east-west traffic clears the box
//                  before north-south traffic (which starts at rest) arrives
//   parking_lot    two aisle movers, a pedestrian entering across the lot
//                  edge, then parked cars in stalls
Scenario generate_synthetic(const SyntheticSpec& spec);

// A polyline of `n_points` samples, `spacing` meters apart, made of long
// straight runs joined by gentle arcs. Used for decimation studies.
std::vector<Vec2> mostly_straight_polyline(std::size_t n_points, std::uint64_t seed,
                                           double spacing = 0.1);

}  // namespace drivesim
