#include "drivesim/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "drivesim/dynamics.hpp"
#include "drivesim/random.hpp"

namespace drivesim {

namespace {

constexpr double kSampleSpacing = 0.5;  // meters between map samples

// Lane geometry shared by the road templates.
constexpr double kLaneWidth = 3.5;

struct AgentPlan {
  ObjectKind kind = ObjectKind::kVehicle;
  double length = 4.5;
  double width = 2.0;
  Vec2 start;
  double heading = 0.0;
  double travel = 0.0;   // meters covered by the final step
  int wait_steps = 0;    // steps at rest before a constant-acceleration launch
};

class PolylineBuilder {
 public:
  explicit PolylineBuilder(Vec2 start) { pts_.push_back(start); }

  PolylineBuilder& line_to(Vec2 end) {
    const Vec2 from = pts_.back();
    const double len = distance(from, end);
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / kSampleSpacing)));
    for (std::size_t k = 1; k <= n; ++k) {
      pts_.push_back(from + (end - from) * (static_cast<double>(k) / static_cast<double>(n)));
    }
    return *this;
  }

  PolylineBuilder& arc(Vec2 center, double radius, double from_angle, double to_angle) {
    const double len = std::abs(to_angle - from_angle) * radius;
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / kSampleSpacing)));
    for (std::size_t k = 1; k <= n; ++k) {
      const double a = from_angle + (to_angle - from_angle) * static_cast<double>(k) / static_cast<double>(n);
      pts_.push_back(center + unit_vector(a) * radius);
    }
    return *this;
  }

  std::vector<Vec2> take() { return std::move(pts_); }

 private:
  std::vector<Vec2> pts_;
};

std::vector<Vec2> line(Vec2 a, Vec2 b) { return PolylineBuilder(a).line_to(b).take(); }

std::vector<Vec2> rectangle(Vec2 lo, Vec2 hi) {
  return PolylineBuilder(lo).line_to({hi.x, lo.y}).line_to(hi).line_to({lo.x, hi.y}).line_to(lo).take();
}

ObjectLog roll_out(const AgentPlan& plan, std::int64_t id, double dt, int num_steps) {
  ObjectLog obj;
  obj.id = id;
  obj.kind = plan.kind;
  obj.length = plan.length;
  obj.width = plan.width;

  const int moving_steps = num_steps - 1 - plan.wait_steps;
  double v0 = 0.0;
  double accel = 0.0;
  if (plan.travel > 0.0 && moving_steps > 0) {
    const double t_move = moving_steps * dt;
    if (plan.wait_steps == 0) {
      v0 = plan.travel / t_move;
    } else {
      accel = 2.0 * plan.travel / (t_move * t_move);
    }
  }

  const VehicleParams params{plan.length, 100.0};
  ActionBounds unclamped;
  unclamped.max_acceleration = std::numeric_limits<double>::infinity();

  AgentState state;
  state.position = plan.start;
  state.heading = normalize_angle(plan.heading);
  state.speed = v0;
  state.velocity = unit_vector(state.heading) * v0;
  obj.states.reserve(static_cast<std::size_t>(num_steps));
  for (int t = 0; t < num_steps; ++t) {
    obj.states.push_back({state.position, state.heading, state.velocity, true});
    const double a = t < plan.wait_steps ? 0.0 : accel;
    state = step_classic(state, {a, 0.0, 0.0}, dt, params, unclamped);
  }
  obj.goal = obj.states.back().position;
  return obj;
}

struct Layout {
  std::vector<AgentPlan> slots;
  std::vector<RoadElement> roads;
};

void add_road(Layout& layout, RoadKind kind, std::vector<Vec2> geometry) {
  layout.roads.push_back({static_cast<std::int64_t>(1000 + layout.roads.size()), kind, std::move(geometry)});
}

AgentPlan vehicle(Rng& rng, Vec2 start, double heading, double travel, int wait_steps = 0) {
  AgentPlan p;
  p.kind = ObjectKind::kVehicle;
  p.length = rng.uniform(4.2, 5.0);
  p.width = rng.uniform(1.8, 2.1);
  p.start = start;
  p.heading = heading;
  p.travel = travel;
  p.wait_steps = wait_steps;
  return p;
}

// Four +x lanes between road edges at y = 0 and y = 14.
Layout straight_road(Rng& rng) {
  Layout layout;
  constexpr double x_min = -80.0;
  constexpr double x_max = 80.0;
  constexpr int lanes = 4;
  add_road(layout, RoadKind::kRoadEdge, line({x_min, 0.0}, {x_max, 0.0}));
  add_road(layout, RoadKind::kRoadEdge, line({x_min, lanes * kLaneWidth}, {x_max, lanes * kLaneWidth}));
  for (int l = 0; l < lanes; ++l) {
    const double y = kLaneWidth * (l + 0.5);
    add_road(layout, RoadKind::kLane, line({x_min, y}, {x_max, y}));
  }
  for (int l = 1; l < lanes; ++l) {
    add_road(layout, RoadKind::kRoadLine, line({x_min, l * kLaneWidth}, {x_max, l * kLaneWidth}));
  }
  add_road(layout, RoadKind::kCrosswalk, rectangle({60.0, 0.0}, {64.0, lanes * kLaneWidth}));
  add_road(layout, RoadKind::kStopSign, {{58.0, -1.0}});

  constexpr int depth = 6;
  for (int s = 0; s < depth; ++s) {
    for (int l = 0; l < lanes; ++l) {
      const double x = -12.0 * s + rng.uniform(-1.0, 1.0);
      layout.slots.push_back(vehicle(rng, {x, kLaneWidth * (l + 0.5)}, 0.0, 40.0));
    }
  }
  return layout;
}

// Two lanes each way on both axes; the road occupies |x| <= 7 or |y| <= 7.
Layout intersection(Rng& rng, int num_steps) {
  Layout layout;
  constexpr double half = 2.0 * kLaneWidth;
  constexpr double extent = 100.0;
  constexpr double fillet = 4.0;

  for (const double sx : {1.0, -1.0}) {
    for (const double sy : {1.0, -1.0}) {
      auto m = [&](Vec2 p) { return Vec2{sx * p.x, sy * p.y}; };
      std::vector<Vec2> curb = PolylineBuilder({half, extent})
                                   .line_to({half, half + fillet})
                                   .arc({half + fillet, half + fillet}, fillet, kPi, 1.5 * kPi)
                                   .line_to({extent, half})
                                   .take();
      for (Vec2& p : curb) p = m(p);
      add_road(layout, RoadKind::kRoadEdge, std::move(curb));
    }
  }
  for (const double off : {-1.5 * kLaneWidth, -0.5 * kLaneWidth, 0.5 * kLaneWidth, 1.5 * kLaneWidth}) {
    add_road(layout, RoadKind::kLane, line({-extent, off}, {extent, off}));
    add_road(layout, RoadKind::kLane, line({off, -extent}, {off, extent}));
  }
  for (const double s : {1.0, -1.0}) {
    add_road(layout, RoadKind::kRoadLine, line({s * (half + 1.0), 0.0}, {s * extent, 0.0}));
    add_road(layout, RoadKind::kRoadLine, line({0.0, s * (half + 1.0)}, {0.0, s * extent}));
    add_road(layout, RoadKind::kCrosswalk, rectangle({s > 0 ? half : -half - 3.0, -half}, {s > 0 ? half + 3.0 : -half, half}));
    add_road(layout, RoadKind::kCrosswalk, rectangle({-half, s > 0 ? half : -half - 3.0}, {half, s > 0 ? half + 3.0 : -half}));
  }
  for (const double sx : {1.0, -1.0}) {
    for (const double sy : {1.0, -1.0}) add_road(layout, RoadKind::kStopSign, {{sx * (half + 1.5), sy * (half + 1.5)}});
  }

  // North-south traffic waits, then launches so it reaches the box only after
  // every east-west slot has cleared it.
  const int wait = static_cast<int>(std::lround((num_steps - 1) * 25.0 / 90.0));
  constexpr std::array<double, 2> ew_start = {12.0, 24.0};
  constexpr std::array<double, 2> ns_start = {60.0, 72.0};
  constexpr double ew_travel = 60.0;
  constexpr double ns_travel = 80.0;
  const double inner = 0.5 * kLaneWidth;
  const double outer = 1.5 * kLaneWidth;
  // Slots 0-7 are the first rank of every lane, 8-15 the second.
  for (std::size_t s = 0; s < 2; ++s) {
    for (const double lane : {inner, outer}) {
      const double jitter_e = rng.uniform(-1.0, 1.0);
      layout.slots.push_back(vehicle(rng, {-ew_start[s] + jitter_e, -lane}, 0.0, ew_travel));
      const double jitter_w = rng.uniform(-1.0, 1.0);
      layout.slots.push_back(vehicle(rng, {ew_start[s] + jitter_w, lane}, kPi, ew_travel));
    }
    for (const double lane : {inner, outer}) {
      const double jitter_n = rng.uniform(-1.0, 1.0);
      layout.slots.push_back(vehicle(rng, {lane, -ns_start[s] + jitter_n}, 0.5 * kPi, ns_travel, wait));
      const double jitter_s = rng.uniform(-1.0, 1.0);
      layout.slots.push_back(vehicle(rng, {-lane, ns_start[s] + jitter_s}, -0.5 * kPi, ns_travel, wait));
    }
  }
  return layout;
}

// Lot |x| <= 35, |y| <= 10 bounded by a road edge; aisle along x.
Layout parking_lot(Rng& rng) {
  Layout layout;
  add_road(layout, RoadKind::kRoadEdge, rectangle({-35.0, -10.0}, {35.0, 10.0}));
  add_road(layout, RoadKind::kLane, line({-35.0, -2.0}, {35.0, -2.0}));
  add_road(layout, RoadKind::kLane, line({35.0, 2.0}, {-35.0, 2.0}));
  add_road(layout, RoadKind::kDriveway, line({-45.0, 0.0}, {-35.0, 0.0}));
  add_road(layout, RoadKind::kCrosswalk, rectangle({-1.0, 10.0}, {1.0, 16.0}));
  add_road(layout, RoadKind::kSpeedBump, line({-10.0, -4.0}, {-10.0, 4.0}));

  std::vector<double> stall_x;
  for (int k = 1; k <= 9; ++k) {
    stall_x.push_back(-3.0 * k);
    stall_x.push_back(3.0 * k);
  }
  std::sort(stall_x.begin(), stall_x.end());
  for (const double sy : {1.0, -1.0}) {
    for (const double x : stall_x) {
      add_road(layout, RoadKind::kRoadLine, line({x - 1.5, sy * 4.0}, {x - 1.5, sy * 9.5}));
    }
  }

  layout.slots.push_back(vehicle(rng, {-25.0 + rng.uniform(-1.0, 1.0), -2.0}, 0.0, 40.0));
  layout.slots.push_back(vehicle(rng, {25.0 + rng.uniform(-1.0, 1.0), 2.0}, kPi, 40.0));

  AgentPlan walker;
  walker.kind = ObjectKind::kPedestrian;
  walker.length = 0.8;
  walker.width = 0.8;
  walker.start = {0.0, 14.0};
  walker.heading = -0.5 * kPi;
  walker.travel = 9.0;
  layout.slots.push_back(walker);

  for (const double x : stall_x) {
    for (const double sy : {1.0, -1.0}) {
      layout.slots.push_back(vehicle(rng, {x, sy * 6.75}, sy * 0.5 * kPi, 0.0));
    }
  }
  return layout;
}

}  // namespace

std::string_view to_string(MapTemplate t) {
  switch (t) {
    case MapTemplate::kStraightRoad: return "straight_road";
    case MapTemplate::kIntersection: return "intersection";
    case MapTemplate::kParkingLot: return "parking_lot";
  }
  return "unknown";
}

std::optional<MapTemplate> parse_map_template(std::string_view name) {
  for (const MapTemplate t : {MapTemplate::kStraightRoad, MapTemplate::kIntersection, MapTemplate::kParkingLot}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

std::size_t template_capacity(MapTemplate t) {
  switch (t) {
    case MapTemplate::kStraightRoad: return 24;
    case MapTemplate::kIntersection: return 16;
    case MapTemplate::kParkingLot: return 39;
  }
  return 0;
}

Scenario generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_agents == 0) throw InvalidSpec("n_agents must be at least 1");
  if (spec.n_agents > template_capacity(spec.map)) {
    throw InvalidSpec(std::string(to_string(spec.map)) + " holds at most " +
                      std::to_string(template_capacity(spec.map)) + " agents, requested " +
                      std::to_string(spec.n_agents));
  }
  if (!(spec.timestep > 0.0) || spec.num_steps < 1) throw InvalidSpec("timestep and num_steps must be positive");

  Rng rng(spec.seed);
  Layout layout;
  switch (spec.map) {
    case MapTemplate::kStraightRoad: layout = straight_road(rng); break;
    case MapTemplate::kIntersection: layout = intersection(rng, spec.num_steps); break;
    case MapTemplate::kParkingLot: layout = parking_lot(rng); break;
  }

  Scenario s;
  s.name = std::string(to_string(spec.map)) + "_n" + std::to_string(spec.n_agents) + "_s" +
           std::to_string(spec.seed);
  s.timestep = spec.timestep;
  s.num_steps = spec.num_steps;
  s.roads = std::move(layout.roads);
  for (std::size_t i = 0; i < spec.n_agents; ++i) {
    s.objects.push_back(roll_out(layout.slots[i], static_cast<std::int64_t>(i), spec.timestep, spec.num_steps));
  }
  return s;
}

std::vector<Vec2> mostly_straight_polyline(std::size_t n_points, std::uint64_t seed, double spacing) {
  Rng rng(seed);
  std::vector<Vec2> pts;
  pts.reserve(n_points);
  Vec2 p{0.0, 0.0};
  double heading = rng.uniform(-kPi, kPi);
  pts.push_back(p);
  while (pts.size() < n_points) {
    // Straight run.
    const auto run = static_cast<std::size_t>(rng.uniform(20.0, 80.0) / spacing);
    for (std::size_t k = 0; k < run && pts.size() < n_points; ++k) {
      p += unit_vector(heading) * spacing;
      pts.push_back(p);
    }
    // Gentle arc.
    const double radius = rng.uniform(20.0, 60.0);
    const double turn = rng.uniform(0.2, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    const auto arc_steps = static_cast<std::size_t>(std::abs(turn) * radius / spacing);
    const double dtheta = turn / static_cast<double>(std::max<std::size_t>(arc_steps, 1));
    for (std::size_t k = 0; k < arc_steps && pts.size() < n_points; ++k) {
      heading += dtheta;
      p += unit_vector(heading) * spacing;
      pts.push_back(p);
    }
  }
  return pts;
}

}  // namespace drivesim
