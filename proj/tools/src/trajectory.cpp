#include "drivesim/cli/cli.hpp"
#include "drivesim/scenario_io.hpp"
#include "json.hpp"

namespace drivesim::cli {

using nlohmann::json;

std::string serialize_trajectory(const Trajectory& tr) {
  json frames = json::array();
  for (const TrajectoryFrame& f : tr.frames) {
    json agents = json::array();
    for (const AgentPose& a : f.agents) {
      agents.push_back({{"id", a.id},
                        {"p", {a.position.x, a.position.y}},
                        {"heading", a.heading},
                        {"speed", a.speed},
                        {"present", a.present}});
    }
    frames.push_back({{"t", f.t}, {"agents", std::move(agents)}});
  }
  const json doc = {
      {"format", kTrajectoryFormat},
      {"policy", tr.policy},
      {"scenario", json::parse(serialize_scenario(tr.scenario))},
      {"frames", std::move(frames)},
      {"metrics",
       {{"goal_rate", tr.metrics.goal_rate},
        {"veh_collision_rate", tr.metrics.veh_collision_rate},
        {"offroad_rate", tr.metrics.offroad_rate},
        {"episodes", tr.metrics.episodes},
        {"controlled_agents", tr.metrics.controlled_agents}}}};
  return doc.dump();
}

Trajectory parse_trajectory(std::string_view text) {
  auto bad = [](const std::string& path, const std::string& what) -> ScenarioError {
    return ScenarioError(ScenarioError::Code::kTypeMismatch, what, path);
  };
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioError(ScenarioError::Code::kMalformedJson, e.what(), "$");
  }
  if (!doc.is_object() || doc.value("format", "") != kTrajectoryFormat) {
    throw bad("format", "not a trajectory document");
  }
  Trajectory tr;
  try {
    tr.policy = doc.at("policy").get<std::string>();
    tr.scenario = parse_scenario(doc.at("scenario").dump());
    const json& frames = doc.at("frames");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      TrajectoryFrame f;
      f.t = frames[i].at("t").get<std::size_t>();
      for (const json& a : frames[i].at("agents")) {
        AgentPose pose;
        pose.id = a.at("id").get<std::int64_t>();
        pose.position = {a.at("p").at(0).get<double>(), a.at("p").at(1).get<double>()};
        pose.heading = a.at("heading").get<double>();
        pose.speed = a.at("speed").get<double>();
        pose.present = a.at("present").get<bool>();
        f.agents.push_back(pose);
      }
      tr.frames.push_back(std::move(f));
    }
    const json& m = doc.at("metrics");
    tr.metrics.goal_rate = m.at("goal_rate").get<double>();
    tr.metrics.veh_collision_rate = m.at("veh_collision_rate").get<double>();
    tr.metrics.offroad_rate = m.at("offroad_rate").get<double>();
    tr.metrics.episodes = m.at("episodes").get<std::size_t>();
    tr.metrics.controlled_agents = m.at("controlled_agents").get<std::size_t>();
  } catch (const json::exception& e) {
    throw bad("$", e.what());
  }
  return tr;
}

}  // namespace drivesim::cli
