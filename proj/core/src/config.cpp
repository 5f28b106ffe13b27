#include "drivesim/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "drivesim/metrics.hpp"
#include "drivesim/scenario_io.hpp"

namespace drivesim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("cannot parse '" + std::string(text) + "'", std::string(key));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError("value must be finite", std::string(key));
  }
  return value;
}

template <typename Enum>
Enum parse_enum(std::string_view key, std::string_view text,
                std::optional<Enum> (*parser)(std::string_view)) {
  if (auto v = parser(text)) return *v;
  throw ConfigError("unknown value '" + std::string(text) + "'", std::string(key));
}

using Setter = std::function<void(SimConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string_view, Setter>& setters() {
  static const std::map<std::string_view, Setter> table = {
      {"dynamics", [](SimConfig& c, auto k, auto v) { c.dynamics = parse_enum(k, v, parse_dynamics_model); }},
      {"goal_tolerance", [](SimConfig& c, auto k, auto v) { c.goal_tolerance = parse_value<double>(k, v); }},
      {"collision_behavior", [](SimConfig& c, auto k, auto v) { c.collision_behavior = parse_enum(k, v, parse_collision_behavior); }},
      {"init_mode", [](SimConfig& c, auto k, auto v) { c.init_mode = parse_enum(k, v, parse_init_mode); }},
      {"nontrivial_threshold", [](SimConfig& c, auto k, auto v) { c.nontrivial_threshold = parse_value<double>(k, v); }},
      {"max_controlled_per_world", [](SimConfig& c, auto k, auto v) { c.max_controlled_per_world = parse_value<std::size_t>(k, v); }},
      {"seed", [](SimConfig& c, auto k, auto v) { c.seed = parse_value<std::uint64_t>(k, v); }},
      {"v_max", [](SimConfig& c, auto k, auto v) { c.v_max = parse_value<double>(k, v); }},
      {"max_acceleration", [](SimConfig& c, auto k, auto v) { c.bounds.max_acceleration = parse_value<double>(k, v); }},
      {"max_steering", [](SimConfig& c, auto k, auto v) { c.bounds.max_steering = parse_value<double>(k, v); }},
      {"obs.mode", [](SimConfig& c, auto k, auto v) { c.obs.mode = parse_enum(k, v, parse_obs_mode); }},
      {"obs.radius", [](SimConfig& c, auto k, auto v) { c.obs.radius = parse_value<double>(k, v); }},
      {"obs.n_rays", [](SimConfig& c, auto k, auto v) { c.obs.n_rays = parse_value<std::size_t>(k, v); }},
      {"obs.fov", [](SimConfig& c, auto k, auto v) { c.obs.fov = parse_value<double>(k, v); }},
      {"obs.max_range", [](SimConfig& c, auto k, auto v) { c.obs.max_range = parse_value<double>(k, v); }},
      {"obs.max_agents_obs", [](SimConfig& c, auto k, auto v) { c.obs.max_agents_obs = parse_value<std::size_t>(k, v); }},
      {"obs.max_road_points_obs", [](SimConfig& c, auto k, auto v) { c.obs.max_road_points_obs = parse_value<std::size_t>(k, v); }},
  };
  return table;
}

}  // namespace

SimConfig parse_sim_config(std::string_view text, const SimConfig& base) {
  SimConfig cfg = base;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected key = value", "line " + std::to_string(line_no));
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("unknown key '" + std::string(key) + "'", "line " + std::to_string(line_no));
    }
    it->second(cfg, key, value);
  }
  try {
    validate_config(cfg);
  } catch (const EngineError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

SimConfig load_sim_config(const std::filesystem::path& path, const SimConfig& base) {
  return parse_sim_config(read_text_file(path), base);
}

std::string format_sim_config(const SimConfig& c) {
  std::ostringstream out;
  out << "dynamics = " << to_string(c.dynamics) << '\n'
      << "goal_tolerance = " << format_double(c.goal_tolerance) << '\n'
      << "collision_behavior = " << to_string(c.collision_behavior) << '\n'
      << "init_mode = " << to_string(c.init_mode) << '\n'
      << "nontrivial_threshold = " << format_double(c.nontrivial_threshold) << '\n'
      << "max_controlled_per_world = " << c.max_controlled_per_world << '\n'
      << "seed = " << c.seed << '\n'
      << "v_max = " << format_double(c.v_max) << '\n'
      << "max_acceleration = " << format_double(c.bounds.max_acceleration) << '\n'
      << "max_steering = " << format_double(c.bounds.max_steering) << '\n'
      << "obs.mode = " << to_string(c.obs.mode) << '\n'
      << "obs.radius = " << format_double(c.obs.radius) << '\n'
      << "obs.n_rays = " << c.obs.n_rays << '\n'
      << "obs.fov = " << format_double(c.obs.fov) << '\n'
      << "obs.max_range = " << format_double(c.obs.max_range) << '\n'
      << "obs.max_agents_obs = " << c.obs.max_agents_obs << '\n'
      << "obs.max_road_points_obs = " << c.obs.max_road_points_obs << '\n';
  return out.str();
}

}  // namespace drivesim
