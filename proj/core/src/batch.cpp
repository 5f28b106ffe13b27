#include <algorithm>

#include "drivesim/engine.hpp"

namespace drivesim {

SimBatch::SimBatch(std::vector<std::shared_ptr<const PreparedScenario>> scenarios,
                   const SimConfig& cfg, std::size_t num_workers)
    : cfg_(cfg), pool_(num_workers) {
  if (scenarios.empty()) {
    throw EngineError(EngineError::Code::kNoScenarios, "a batch needs at least one scenario");
  }
  validate_config(cfg_);
  obs_width_ = obs_layout(cfg_.obs).width;
  worlds_.reserve(scenarios.size());
  agent_offsets_.push_back(0);
  controlled_offsets_.push_back(0);
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    World& world = worlds_.emplace_back(std::move(scenarios[w]), cfg_, w);
    agent_offsets_.push_back(agent_offsets_.back() + world.num_agents());
    controlled_offsets_.push_back(controlled_offsets_.back() + world.num_controlled());
    if (world.num_controlled() == 0) {
      warnings_.push_back("world " + std::to_string(w) + " (" + world.scenario().base.name +
                          "): no controllable agents, replay only");
    }
  }
  observations_.assign(total_controlled() * obs_width_, 0.0);
  rewards_.assign(total_controlled(), 0.0);
  dones_.assign(total_agents(), 0);
  infos_.assign(total_agents(), AgentInfo{});
}

WorldOutput SimBatch::slice(std::size_t w) {
  const std::size_t c0 = controlled_offsets_[w];
  const std::size_t nc = controlled_offsets_[w + 1] - c0;
  const std::size_t a0 = agent_offsets_[w];
  const std::size_t na = agent_offsets_[w + 1] - a0;
  return {std::span(observations_).subspan(c0 * obs_width_, nc * obs_width_),
          std::span(rewards_).subspan(c0, nc), std::span(dones_).subspan(a0, na),
          std::span(infos_).subspan(a0, na)};
}

std::span<const double> SimBatch::reset() {
  pool_.parallel_for(worlds_.size(), [&](std::size_t w) { worlds_[w].reset(slice(w)); });
  return observations_;
}

std::span<const double> SimBatch::reset(std::span<const std::size_t> world_ids) {
  for (std::size_t w : world_ids) {
    if (w >= worlds_.size()) {
      throw EngineError(EngineError::Code::kBadWorldId,
                        "world id " + std::to_string(w) + " out of range");
    }
  }
  pool_.parallel_for(world_ids.size(),
                     [&](std::size_t k) { worlds_[world_ids[k]].reset(slice(world_ids[k])); });
  return observations_;
}

void SimBatch::step(std::span<const Action> actions) {
  if (actions.size() != total_controlled()) {
    throw EngineError(EngineError::Code::kActionCountMismatch,
                      "expected " + std::to_string(total_controlled()) + " actions, got " +
                          std::to_string(actions.size()));
  }
  pool_.parallel_for(worlds_.size(), [&](std::size_t w) {
    const std::size_t c0 = controlled_offsets_[w];
    worlds_[w].step(actions.subspan(c0, controlled_offsets_[w + 1] - c0), slice(w));
  });
  collect_episodes();
}

void SimBatch::collect_episodes() {
  for (const World& world : worlds_) {
    if (world.finished_episode()) episodes_.push_back(*world.finished_episode());
  }
}

bool SimBatch::all_done() const {
  return std::all_of(worlds_.begin(), worlds_.end(), [](const World& w) { return w.done(); });
}

std::vector<std::size_t> SimBatch::done_worlds() const {
  std::vector<std::size_t> ids;
  for (std::size_t w = 0; w < worlds_.size(); ++w) {
    if (worlds_[w].done()) ids.push_back(w);
  }
  return ids;
}

SimBatch init_batch(std::span<const PreparedScenario> scenarios, const SimConfig& cfg,
                    std::size_t num_workers) {
  std::vector<std::shared_ptr<const PreparedScenario>> shared;
  shared.reserve(scenarios.size());
  for (const PreparedScenario& s : scenarios) {
    shared.push_back(std::make_shared<const PreparedScenario>(s));
  }
  return SimBatch(std::move(shared), cfg, num_workers);
}

}  // namespace drivesim
