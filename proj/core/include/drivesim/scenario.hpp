#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drivesim/types.hpp"

namespace drivesim {

enum class ObjectKind : std::uint8_t { kVehicle, kPedestrian, kCyclist };

enum class RoadKind : std::uint8_t {
  kRoadEdge,
  kLane,
  kRoadLine,
  kCrosswalk,
  kSpeedBump,
  kStopSign,
  kDriveway,
};
inline constexpr std::size_t kNumRoadKinds = 7;

std::string_view to_string(ObjectKind kind);
std::string_view to_string(RoadKind kind);
std::optional<ObjectKind> parse_object_kind(std::string_view name);
std::optional<RoadKind> parse_road_kind(std::string_view name);

struct LoggedStep {
  Vec2 position;
  double heading = 0.0;
  Vec2 velocity;
  bool valid = false;

  friend bool operator==(const LoggedStep&, const LoggedStep&) = default;
};

struct ObjectLog {
  std::int64_t id = 0;
  ObjectKind kind = ObjectKind::kVehicle;
  double length = 0.0;
  double width = 0.0;
  Vec2 goal;
  std::vector<LoggedStep> states;
  bool force_replay = false;  // unreachable goal: always replay the log

  // Index of the first valid logged step, if any.
  std::optional<std::size_t> first_valid() const;
  std::optional<std::size_t> last_valid() const;

  friend bool operator==(const ObjectLog&, const ObjectLog&) = default;
};

struct RoadElement {
  std::int64_t id = 0;
  RoadKind kind = RoadKind::kRoadEdge;
  std::vector<Vec2> geometry;

  friend bool operator==(const RoadElement&, const RoadElement&) = default;
};

struct Scenario {
  std::string name;
  double timestep = 0.1;
  int num_steps = 91;
  std::vector<ObjectLog> objects;
  std::vector<RoadElement> roads;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct PrepStats {
  std::size_t n_objects = 0;
  std::size_t n_controllable = 0;
  std::size_t n_road_points_before = 0;
  std::size_t n_road_points_after = 0;

  double reduction() const {
    return n_road_points_after == 0
               ? 1.0
               : static_cast<double>(n_road_points_before) / static_cast<double>(n_road_points_after);
  }

  friend bool operator==(const PrepStats&, const PrepStats&) = default;
};

struct PreparedScenario {
  Scenario base;
  std::vector<RoadElement> decimated_roads;
  std::vector<bool> controllable;
  PrepStats stats;

  friend bool operator==(const PreparedScenario&, const PreparedScenario&) = default;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  enum class Severity : std::uint8_t { kWarning, kError };
  enum class Kind : std::uint8_t {
    kNonFinite,
    kZeroLengthSegment,
    kDuplicateId,
    kHeadingOutOfRange,
    kLengthMismatch,
    kNoValidStep,
    kBadDimensions,
    kTooFewPoints,
    kBadTiming,
  };
  Severity severity = Severity::kError;
  Kind kind = Kind::kNonFinite;
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool empty() const { return violations.empty(); }
  bool has_errors() const;
  std::size_t count(Violation::Kind kind) const;
  std::string summary() const;
};

// Never throws.
ValidationReport validate_scenario(const Scenario& scenario);

// ---------------------------------------------------------------------------
// Preparation

inline constexpr double kDefaultDecimationThreshold = 0.05;  // m^2
inline constexpr double kDefaultControllableThreshold = 2.0;  // m

// True for objects with a valid first step, no forced replay, and a start
// position more than `threshold` meters from the goal.
std::vector<bool> mark_controllable(const Scenario& scenario, double threshold);

// Decimates every polyline except stop signs and computes the controllable
// mask. Polylines with fewer than three points pass through unchanged.
PreparedScenario preprocess(const Scenario& scenario,
                            double decimation_threshold = kDefaultDecimationThreshold,
                            double controllable_threshold = kDefaultControllableThreshold);

}  // namespace drivesim
