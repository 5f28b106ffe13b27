#include "drivesim/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace drivesim {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(ScenarioError::Code code, const std::string& path, const std::string& what) {
  throw ScenarioError(code, what, path);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ScenarioError::Code::kMissingField, path.empty() ? key : path + "." + key,
         "missing required field");
  }
  return *it;
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(ScenarioError::Code::kTypeMismatch, path, "expected a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(ScenarioError::Code::kTypeMismatch, path, "expected an integer");
  return v.get<std::int64_t>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(ScenarioError::Code::kTypeMismatch, path, "expected a boolean");
  return v.get<bool>();
}

const std::string& as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(ScenarioError::Code::kTypeMismatch, path, "expected a string");
  return v.get_ref<const std::string&>();
}

const json::array_t& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(ScenarioError::Code::kTypeMismatch, path, "expected an array");
  return v.get_ref<const json::array_t&>();
}

Vec2 as_vec2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) {
    fail(ScenarioError::Code::kTypeMismatch, path, "expected an [x, y] pair");
  }
  return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
}

json to_json(Vec2 v) { return json::array({v.x, v.y}); }

LoggedStep parse_step(const json& j, const std::string& path, std::vector<std::string>* warnings) {
  if (!j.is_object()) fail(ScenarioError::Code::kTypeMismatch, path, "expected an object");
  LoggedStep st;
  st.position = as_vec2(require(j, "p", path), join(path, "p"));
  st.heading = as_number(require(j, "heading", path), join(path, "heading"));
  if (const auto it = j.find("v"); it != j.end()) st.velocity = as_vec2(*it, join(path, "v"));
  if (const auto it = j.find("valid"); it != j.end()) {
    st.valid = as_bool(*it, join(path, "valid"));
  } else {
    st.valid = true;
  }
  if (std::isfinite(st.heading) && !(st.heading > -kPi && st.heading <= kPi)) {
    const double fixed = normalize_angle(st.heading);
    if (warnings) {
      std::ostringstream msg;
      msg << path << ".heading: " << st.heading << " normalized to " << fixed;
      warnings->push_back(msg.str());
    }
    st.heading = fixed;
  }
  return st;
}

ObjectLog parse_object(const json& j, const std::string& path, int num_steps,
                       std::vector<std::string>* warnings) {
  if (!j.is_object()) fail(ScenarioError::Code::kTypeMismatch, path, "expected an object");
  ObjectLog obj;
  obj.id = as_integer(require(j, "id", path), join(path, "id"));
  const std::string& type = as_string(require(j, "type", path), join(path, "type"));
  const auto kind = parse_object_kind(type);
  if (!kind) fail(ScenarioError::Code::kInvalidValue, join(path, "type"), "unknown object type '" + type + "'");
  obj.kind = *kind;
  obj.length = as_number(require(j, "length_m", path), join(path, "length_m"));
  obj.width = as_number(require(j, "width_m", path), join(path, "width_m"));
  if (const auto it = j.find("force_replay"); it != j.end()) {
    obj.force_replay = as_bool(*it, join(path, "force_replay"));
  }

  const std::string states_path = join(path, "states");
  const auto& states = as_array(require(j, "states", path), states_path);
  if (states.size() != static_cast<std::size_t>(num_steps)) {
    fail(ScenarioError::Code::kLengthMismatch, states_path,
         "expected " + std::to_string(num_steps) + " states, found " + std::to_string(states.size()));
  }
  obj.states.reserve(states.size());
  for (std::size_t t = 0; t < states.size(); ++t) {
    obj.states.push_back(parse_step(states[t], states_path + "[" + std::to_string(t) + "]", warnings));
  }

  if (const auto it = j.find("goal"); it != j.end() && !it->is_null()) {
    obj.goal = as_vec2(*it, join(path, "goal"));
  } else if (const auto last = obj.last_valid()) {
    obj.goal = obj.states[*last].position;
  } else {
    fail(ScenarioError::Code::kMissingField, join(path, "goal"),
         "no goal given and no valid state to derive one from");
  }
  return obj;
}

RoadElement parse_road(const json& j, const std::string& path) {
  if (!j.is_object()) fail(ScenarioError::Code::kTypeMismatch, path, "expected an object");
  RoadElement road;
  road.id = as_integer(require(j, "id", path), join(path, "id"));
  const std::string& type = as_string(require(j, "type", path), join(path, "type"));
  const auto kind = parse_road_kind(type);
  if (!kind) fail(ScenarioError::Code::kInvalidValue, join(path, "type"), "unknown road type '" + type + "'");
  road.kind = *kind;
  const std::string gpath = join(path, "geometry");
  const auto& pts = as_array(require(j, "geometry", path), gpath);
  road.geometry.reserve(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    road.geometry.push_back(as_vec2(pts[k], gpath + "[" + std::to_string(k) + "]"));
  }
  return road;
}

json road_to_json(const RoadElement& road) {
  json geometry = json::array();
  for (const Vec2& p : road.geometry) geometry.push_back(to_json(p));
  return {{"id", road.id}, {"type", std::string(to_string(road.kind))}, {"geometry", std::move(geometry)}};
}

json scenario_to_json(const Scenario& s) {
  json objects = json::array();
  for (const ObjectLog& obj : s.objects) {
    json states = json::array();
    for (const LoggedStep& st : obj.states) {
      states.push_back({{"p", to_json(st.position)},
                        {"heading", st.heading},
                        {"v", to_json(st.velocity)},
                        {"valid", st.valid}});
    }
    objects.push_back({{"id", obj.id},
                       {"type", std::string(to_string(obj.kind))},
                       {"length_m", obj.length},
                       {"width_m", obj.width},
                       {"goal", to_json(obj.goal)},
                       {"force_replay", obj.force_replay},
                       {"states", std::move(states)}});
  }
  json roads = json::array();
  for (const RoadElement& road : s.roads) roads.push_back(road_to_json(road));
  return {{"name", s.name},
          {"timestep_s", s.timestep},
          {"num_steps", s.num_steps},
          {"objects", std::move(objects)},
          {"roads", std::move(roads)}};
}

Scenario scenario_from_json(const json& root, std::vector<std::string>* warnings) {
  if (!root.is_object()) fail(ScenarioError::Code::kTypeMismatch, "$", "expected a JSON object");
  Scenario s;
  if (const auto it = root.find("name"); it != root.end()) s.name = as_string(*it, "name");
  if (const auto it = root.find("timestep_s"); it != root.end()) s.timestep = as_number(*it, "timestep_s");
  if (const auto it = root.find("num_steps"); it != root.end()) {
    const std::int64_t n = as_integer(*it, "num_steps");
    if (n < 1 || n > 1'000'000) fail(ScenarioError::Code::kInvalidValue, "num_steps", "must be in [1, 1e6]");
    s.num_steps = static_cast<int>(n);
  }
  if (!(std::isfinite(s.timestep) && s.timestep > 0.0)) {
    fail(ScenarioError::Code::kInvalidValue, "timestep_s", "must be positive");
  }

  const auto& objects = as_array(require(root, "objects", ""), "objects");
  s.objects.reserve(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    s.objects.push_back(parse_object(objects[i], "objects[" + std::to_string(i) + "]", s.num_steps, warnings));
  }
  const auto& roads = as_array(require(root, "roads", ""), "roads");
  s.roads.reserve(roads.size());
  for (std::size_t i = 0; i < roads.size(); ++i) {
    s.roads.push_back(parse_road(roads[i], "roads[" + std::to_string(i) + "]"));
  }
  return s;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ScenarioError::Code::kMalformedJson, "$", e.what());
  }
}

constexpr const char* kPreparedFormat = "drivesim.prepared.v1";

}  // namespace

Scenario parse_scenario(std::string_view json_text, std::vector<std::string>* warnings) {
  return scenario_from_json(parse_document(json_text), warnings);
}

std::string serialize_scenario(const Scenario& scenario, int indent) {
  return scenario_to_json(scenario).dump(indent);
}

std::string serialize_prepared(const PreparedScenario& p, int indent) {
  json roads = json::array();
  for (const RoadElement& road : p.decimated_roads) roads.push_back(road_to_json(road));
  json mask = json::array();
  for (const bool b : p.controllable) mask.push_back(b);
  json doc = {{"format", kPreparedFormat},
              {"scenario", scenario_to_json(p.base)},
              {"decimated_roads", std::move(roads)},
              {"controllable", std::move(mask)},
              {"stats",
               {{"n_objects", p.stats.n_objects},
                {"n_controllable", p.stats.n_controllable},
                {"n_road_points_before", p.stats.n_road_points_before},
                {"n_road_points_after", p.stats.n_road_points_after}}}};
  return doc.dump(indent);
}

namespace {

bool looks_prepared(const json& root) {
  return root.is_object() && root.contains("scenario") && root.contains("decimated_roads");
}

PreparedScenario prepared_from_json(const json& root) {
  if (!root.is_object()) fail(ScenarioError::Code::kTypeMismatch, "$", "expected a JSON object");
  PreparedScenario p;
  p.base = scenario_from_json(require(root, "scenario", ""), nullptr);
  const auto& roads = as_array(require(root, "decimated_roads", ""), "decimated_roads");
  for (std::size_t i = 0; i < roads.size(); ++i) {
    p.decimated_roads.push_back(parse_road(roads[i], "decimated_roads[" + std::to_string(i) + "]"));
  }
  const auto& mask = as_array(require(root, "controllable", ""), "controllable");
  if (mask.size() != p.base.objects.size()) {
    fail(ScenarioError::Code::kLengthMismatch, "controllable", "mask length differs from object count");
  }
  for (std::size_t i = 0; i < mask.size(); ++i) {
    p.controllable.push_back(as_bool(mask[i], "controllable[" + std::to_string(i) + "]"));
  }
  const json& stats = require(root, "stats", "");
  auto count = [&](const char* key) {
    return static_cast<std::size_t>(as_integer(require(stats, key, "stats"), join("stats", key)));
  };
  p.stats.n_objects = count("n_objects");
  p.stats.n_controllable = count("n_controllable");
  p.stats.n_road_points_before = count("n_road_points_before");
  p.stats.n_road_points_after = count("n_road_points_after");
  return p;
}

}  // namespace

PreparedScenario parse_prepared(std::string_view json_text) {
  return prepared_from_json(parse_document(json_text));
}

bool is_prepared_document(std::string_view json_text) {
  return looks_prepared(parse_document(json_text));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(ScenarioError::Code::kIo, "cannot open file for reading", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ScenarioError(ScenarioError::Code::kIo, "read failed", path.string());
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ScenarioError(ScenarioError::Code::kIo, "cannot open file for writing", path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ScenarioError(ScenarioError::Code::kIo, "write failed", path.string());
}

PreparedScenario load_prepared(const std::filesystem::path& path, double decimation_threshold,
                               double controllable_threshold) {
  const json root = parse_document(read_text_file(path));
  if (looks_prepared(root)) return prepared_from_json(root);
  return preprocess(scenario_from_json(root, nullptr), decimation_threshold, controllable_threshold);
}

std::vector<std::filesystem::path> list_json_files(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw ScenarioError(ScenarioError::Code::kIo, "cannot list directory", dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : it) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace drivesim
