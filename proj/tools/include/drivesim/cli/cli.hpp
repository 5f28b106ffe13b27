#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drivesim/engine.hpp"
#include "drivesim/metrics.hpp"
#include "drivesim/observation.hpp"

namespace drivesim::cli {

// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitIo = 2 };

struct PreprocessOptions {
  std::filesystem::path in_dir;
  std::filesystem::path out_dir;
  double decimate_eps = kDefaultDecimationThreshold;
  double controllable_threshold = kDefaultControllableThreshold;
  bool skip_bad = false;
};

struct BenchOptions {
  std::filesystem::path scenarios;  // directory of scenario JSON files, or one file
  std::vector<std::size_t> worlds = {1};
  std::size_t steps = 100;
  ObsMode obs = ObsMode::kRadial;
  std::string policy = "random";
  std::optional<std::filesystem::path> csv;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: every hardware thread
  std::optional<std::filesystem::path> config;
  double memory_cap_mb = 4096.0;
};

struct RolloutOptions {
  std::filesystem::path scenario;
  std::string policy = "replay";
  std::filesystem::path out;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> metrics_csv;
};

struct RenderOptions {
  std::filesystem::path in;
  std::optional<std::size_t> step;
  std::filesystem::path out;
};

struct SynthOptions {
  std::string template_name = "straight_road";
  std::size_t agents = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

int cmd_preprocess(const PreprocessOptions& opts, std::ostream& out, std::ostream& err);
// `reports`, when given, receives one entry per world count.
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err,
              std::vector<ThroughputReport>* reports = nullptr);
int cmd_rollout(const RolloutOptions& opts, std::ostream& out, std::ostream& err);
int cmd_render(const RenderOptions& opts, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& opts, std::ostream& out, std::ostream& err);

// Parses argv (argv[0] is the program name) and dispatches.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

// ---------------------------------------------------------------------------
// Trajectory files written by `rollout`.

struct AgentPose {
  std::int64_t id = 0;
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
  bool present = false;  // in the scene at this step
};

struct TrajectoryFrame {
  std::size_t t = 0;
  std::vector<AgentPose> agents;  // scenario object order
};

struct Trajectory {
  Scenario scenario;
  std::string policy;
  std::vector<TrajectoryFrame> frames;
  Metrics metrics;
};

inline constexpr std::string_view kTrajectoryFormat = "drivesim.trajectory.v1";

std::string serialize_trajectory(const Trajectory& trajectory);
// Throws ScenarioError on malformed input.
Trajectory parse_trajectory(std::string_view json_text);

// ---------------------------------------------------------------------------
// SVG rendering.

struct RenderAgent {
  std::int64_t id = 0;
  ObjectKind kind = ObjectKind::kVehicle;
  Obb box;
  Vec2 goal;
};

// Bird's-eye view in world coordinates: a y-flip transform on the root
// group keeps polygon points equal to the world coordinates, printed with
// six decimals.
std::string render_svg(std::span<const RoadElement> roads, std::span<const RenderAgent> agents);

}  // namespace drivesim::cli
