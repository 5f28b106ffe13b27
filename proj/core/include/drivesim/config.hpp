#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "drivesim/engine.hpp"

namespace drivesim {

// Flat key-value config files, one `key = value` per line, '#' starts a
// comment. Keys mirror SimConfig:
//
//   dynamics                  classic | invertible
//   goal_tolerance            meters
//   collision_behavior        ignore | remove_agent | end_episode
//   init_mode                 all_nontrivial | all_valid
//   nontrivial_threshold      meters
//   max_controlled_per_world  integer
//   seed                      integer
//   v_max                     m/s
//   max_acceleration          m/s^2
//   max_steering              radians
//   obs.mode                  radial | lidar | view_cone
//   obs.radius                meters
//   obs.n_rays                integer
//   obs.fov                   radians
//   obs.max_range             meters
//   obs.max_agents_obs        integer
//   obs.max_road_points_obs   integer
//
// Unset keys keep their defaults.
class ConfigError : public Error {
 public:
  using Error::Error;  // path() is "line N" or the key
};

// Applies the settings in `text` on top of `base`. Throws ConfigError for
// unknown keys, malformed lines, bad values, or a config that fails
// validate_config.
SimConfig parse_sim_config(std::string_view text, const SimConfig& base = {});
SimConfig load_sim_config(const std::filesystem::path& path, const SimConfig& base = {});

// Every key, in the order listed above; parse_sim_config(format_sim_config(c))
// reproduces c.
std::string format_sim_config(const SimConfig& cfg);

}  // namespace drivesim
