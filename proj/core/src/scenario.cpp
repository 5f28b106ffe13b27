#include "drivesim/scenario.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <unordered_set>

#include "drivesim/geometry.hpp"

namespace drivesim {

namespace {

constexpr std::array<std::string_view, 3> kObjectNames = {"vehicle", "pedestrian", "cyclist"};
constexpr std::array<std::string_view, kNumRoadKinds> kRoadNames = {
    "road_edge", "lane", "road_line", "crosswalk", "speed_bump", "stop_sign", "driveway"};

}  // namespace

std::string_view to_string(ObjectKind kind) { return kObjectNames[static_cast<std::size_t>(kind)]; }
std::string_view to_string(RoadKind kind) { return kRoadNames[static_cast<std::size_t>(kind)]; }

std::optional<ObjectKind> parse_object_kind(std::string_view name) {
  for (std::size_t i = 0; i < kObjectNames.size(); ++i) {
    if (kObjectNames[i] == name) return static_cast<ObjectKind>(i);
  }
  return std::nullopt;
}

std::optional<RoadKind> parse_road_kind(std::string_view name) {
  for (std::size_t i = 0; i < kRoadNames.size(); ++i) {
    if (kRoadNames[i] == name) return static_cast<RoadKind>(i);
  }
  return std::nullopt;
}

std::optional<std::size_t> ObjectLog::first_valid() const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].valid) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> ObjectLog::last_valid() const {
  for (std::size_t i = states.size(); i-- > 0;) {
    if (states[i].valid) return i;
  }
  return std::nullopt;
}

bool ValidationReport::has_errors() const {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity == Violation::Severity::kError; });
}

std::size_t ValidationReport::count(Violation::Kind kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const Violation& v : violations) {
    out << (v.severity == Violation::Severity::kError ? "error" : "warning") << ' ' << v.path
        << ": " << v.message << '\n';
  }
  return out.str();
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport report;
  auto add = [&](Violation::Kind kind, std::string path, std::string message,
                 Violation::Severity severity = Violation::Severity::kError) {
    report.violations.push_back({severity, kind, std::move(path), std::move(message)});
  };

  if (!(std::isfinite(s.timestep) && s.timestep > 0.0)) {
    add(Violation::Kind::kBadTiming, "timestep_s", "timestep must be positive and finite");
  }
  if (s.num_steps < 1) add(Violation::Kind::kBadTiming, "num_steps", "num_steps must be >= 1");

  std::unordered_set<std::int64_t> object_ids;
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const ObjectLog& obj = s.objects[i];
    const std::string path = "objects[" + std::to_string(i) + "]";
    if (!object_ids.insert(obj.id).second) {
      add(Violation::Kind::kDuplicateId, path + ".id", "duplicate object id " + std::to_string(obj.id));
    }
    if (!(std::isfinite(obj.length) && std::isfinite(obj.width) && obj.length > 0.0 &&
          obj.width > 0.0)) {
      add(Violation::Kind::kBadDimensions, path, "length and width must be positive");
    } else if (obj.kind == ObjectKind::kVehicle && obj.length < obj.width) {
      add(Violation::Kind::kBadDimensions, path, "vehicle length is smaller than its width");
    }
    if (!is_finite(obj.goal)) add(Violation::Kind::kNonFinite, path + ".goal", "non-finite goal");
    if (obj.states.size() != static_cast<std::size_t>(std::max(s.num_steps, 0))) {
      add(Violation::Kind::kLengthMismatch, path + ".states",
          "expected " + std::to_string(s.num_steps) + " states, found " +
              std::to_string(obj.states.size()));
    }
    if (!obj.first_valid()) add(Violation::Kind::kNoValidStep, path + ".states", "no valid step");
    for (std::size_t t = 0; t < obj.states.size(); ++t) {
      const LoggedStep& st = obj.states[t];
      if (!st.valid) continue;
      const std::string spath = path + ".states[" + std::to_string(t) + "]";
      if (!is_finite(st.position) || !is_finite(st.velocity) || !std::isfinite(st.heading)) {
        add(Violation::Kind::kNonFinite, spath, "non-finite state");
      } else if (!(st.heading > -kPi && st.heading <= kPi)) {
        add(Violation::Kind::kHeadingOutOfRange, spath + ".heading",
            "heading " + std::to_string(st.heading) + " outside (-pi, pi]",
            Violation::Severity::kWarning);
      }
    }
  }

  std::unordered_set<std::int64_t> road_ids;
  for (std::size_t i = 0; i < s.roads.size(); ++i) {
    const RoadElement& road = s.roads[i];
    const std::string path = "roads[" + std::to_string(i) + "]";
    if (!road_ids.insert(road.id).second) {
      add(Violation::Kind::kDuplicateId, path + ".id", "duplicate road id " + std::to_string(road.id));
    }
    const std::size_t min_points = road.kind == RoadKind::kStopSign ? 1 : 2;
    if (road.geometry.size() < min_points) {
      add(Violation::Kind::kTooFewPoints, path + ".geometry",
          "needs at least " + std::to_string(min_points) + " points");
    }
    for (std::size_t k = 0; k < road.geometry.size(); ++k) {
      if (!is_finite(road.geometry[k])) {
        add(Violation::Kind::kNonFinite, path + ".geometry[" + std::to_string(k) + "]",
            "non-finite point");
      } else if (k > 0 && road.geometry[k] == road.geometry[k - 1]) {
        add(Violation::Kind::kZeroLengthSegment, path + ".geometry[" + std::to_string(k) + "]",
            "repeats the previous point");
      }
    }
  }
  return report;
}

std::vector<bool> mark_controllable(const Scenario& scenario, double threshold) {
  std::vector<bool> mask(scenario.objects.size(), false);
  for (std::size_t i = 0; i < scenario.objects.size(); ++i) {
    const ObjectLog& obj = scenario.objects[i];
    if (obj.force_replay || obj.states.empty() || !obj.states.front().valid) continue;
    mask[i] = distance(obj.states.front().position, obj.goal) > threshold;
  }
  return mask;
}

PreparedScenario preprocess(const Scenario& scenario, double decimation_threshold,
                            double controllable_threshold) {
  PreparedScenario out;
  out.base = scenario;
  out.controllable = mark_controllable(scenario, controllable_threshold);
  out.decimated_roads.reserve(scenario.roads.size());
  for (const RoadElement& road : scenario.roads) {
    RoadElement dec = road;
    if (road.kind != RoadKind::kStopSign && road.geometry.size() >= 3) {
      dec.geometry = decimate_polyline(road.geometry, decimation_threshold);
    }
    out.stats.n_road_points_before += road.geometry.size();
    out.stats.n_road_points_after += dec.geometry.size();
    out.decimated_roads.push_back(std::move(dec));
  }
  out.stats.n_objects = scenario.objects.size();
  out.stats.n_controllable =
      static_cast<std::size_t>(std::count(out.controllable.begin(), out.controllable.end(), true));
  return out;
}

}  // namespace drivesim
