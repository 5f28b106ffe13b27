#include "drivesim/metrics.hpp"

#include <charconv>
#include <fstream>

namespace drivesim {

Metrics compute_metrics(std::span<const EpisodeRecord> episodes) {
  Metrics m;
  std::size_t goals = 0;
  std::size_t collisions = 0;
  std::size_t offroad = 0;
  for (const EpisodeRecord& e : episodes) {
    ++m.episodes;
    for (const AgentInfo& info : e.outcomes) {
      ++m.controlled_agents;
      goals += info.goal != 0;
      collisions += info.veh_collision != 0;
      offroad += info.offroad != 0;
    }
  }
  if (m.controlled_agents > 0) {
    const double n = static_cast<double>(m.controlled_agents);
    m.goal_rate = static_cast<double>(goals) / n;
    m.veh_collision_rate = static_cast<double>(collisions) / n;
    m.offroad_rate = static_cast<double>(offroad) / n;
  }
  return m;
}

ThroughputReport make_throughput_report(std::size_t worlds, std::size_t steps, double elapsed_s,
                                        std::size_t total_agents, std::size_t controlled_agents) {
  ThroughputReport r{worlds, steps, elapsed_s, total_agents, controlled_agents, 0.0, 0.0};
  r.asps = static_cast<double>(steps) * static_cast<double>(total_agents) / elapsed_s;
  r.casps = static_cast<double>(steps) * static_cast<double>(controlled_agents) / elapsed_s;
  return r;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string metrics_csv_row(const EpisodeRecord& episode) {
  const Metrics m = compute_metrics(std::span(&episode, 1));
  std::string name = episode.scenario;
  // Scenario names are free text; keep the row parseable.
  if (name.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : name) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    name = quoted + "\"";
  }
  return name + "," + std::to_string(episode.episode) + "," + std::to_string(m.controlled_agents) +
         "," + format_double(m.goal_rate) + "," + format_double(m.veh_collision_rate) + "," +
         format_double(m.offroad_rate);
}

std::string benchmark_csv_row(const ThroughputReport& r) {
  return std::to_string(r.worlds) + "," + std::to_string(r.steps) + "," +
         std::to_string(r.total_agents) + "," + std::to_string(r.controlled_agents) + "," +
         format_double(r.elapsed_s) + "," + format_double(r.asps) + "," + format_double(r.casps);
}

void append_csv_row(const std::filesystem::path& path, std::string_view header,
                    std::string_view row) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot open for appending", path.string());
  if (fresh) out << header << '\n';
  out << row << '\n';
  if (!out) throw Error("write failed", path.string());
}

}  // namespace drivesim
