#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "drivesim/engine.hpp"

namespace drivesim {

// Fractions over controlled agents; an agent counts at most once per
// episode and category.
struct Metrics {
  double goal_rate = 0.0;
  double veh_collision_rate = 0.0;
  double offroad_rate = 0.0;
  std::size_t episodes = 0;
  std::size_t controlled_agents = 0;  // summed over episodes
};

// All rates are 0 when no controlled agent took part.
Metrics compute_metrics(std::span<const EpisodeRecord> episodes);

// ASPS = steps * total_agents / elapsed_s; CASPS uses controlled_agents.
struct ThroughputReport {
  std::size_t worlds = 0;
  std::size_t steps = 0;
  double elapsed_s = 0.0;
  std::size_t total_agents = 0;
  std::size_t controlled_agents = 0;
  double asps = 0.0;
  double casps = 0.0;
};

ThroughputReport make_throughput_report(std::size_t worlds, std::size_t steps, double elapsed_s,
                                        std::size_t total_agents, std::size_t controlled_agents);

// CSV schemas. Headers never change; rows use round-trip precision.
inline constexpr std::string_view kMetricsCsvHeader =
    "scenario,episode,controlled,goal_rate,veh_collision_rate,offroad_rate";
inline constexpr std::string_view kBenchmarkCsvHeader =
    "worlds,steps,total_agents,controlled_agents,elapsed_s,asps,casps";

std::string metrics_csv_row(const EpisodeRecord& episode);
std::string benchmark_csv_row(const ThroughputReport& report);

// Appends `row` to `path`, writing `header` first when the file is new or
// empty. Throws Error on I/O failure.
void append_csv_row(const std::filesystem::path& path, std::string_view header,
                    std::string_view row);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace drivesim
