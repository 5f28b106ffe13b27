#include <new>
#include <ostream>

#include "drivesim/cli/cli.hpp"
#include "drivesim/config.hpp"
#include "drivesim/policies.hpp"
#include "drivesim/scenario_io.hpp"
#include "drivesim/synthetic.hpp"

namespace drivesim::cli {

namespace fs = std::filesystem;

namespace {

// Runs a command body, mapping exceptions onto exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ScenarioError::Code::kIo ? kExitIo : kExitDomain;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}

std::string ratio_text(double r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", r);
  return buf;
}

SimConfig load_config(const std::optional<fs::path>& path) {
  return path ? load_sim_config(*path) : SimConfig{};
}

std::vector<fs::path> scenario_files(const fs::path& p) {
  if (fs::is_directory(p)) return list_json_files(p);
  if (!fs::exists(p)) throw ScenarioError(ScenarioError::Code::kIo, "no such file or directory", p.string());
  return {p};
}

// Rough resident size of one world; used only for the bench memory cap.
double estimate_world_bytes(const PreparedScenario& s, const SimConfig& cfg) {
  std::size_t points = 0;
  for (const RoadElement& r : s.decimated_roads) points += r.geometry.size();
  const double agents = static_cast<double>(s.base.objects.size());
  const double controlled = static_cast<double>(select_controlled(s, cfg).size());
  const double width = static_cast<double>(obs_layout(cfg.obs).width);
  return agents * 400.0 + controlled * width * sizeof(double) + static_cast<double>(points) * 250.0;
}

void write_with_parents(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  write_text_file(path, text);
}

void append_csv(const fs::path& path, std::string_view header, std::string_view row) {
  try {
    append_csv_row(path, header, row);
  } catch (const Error& e) {
    throw ScenarioError(ScenarioError::Code::kIo, "cannot append CSV row", path.string());
  }
}

}  // namespace

int cmd_preprocess(const PreprocessOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(opts.decimate_eps >= 0.0) || !(opts.controllable_threshold >= 0.0)) {
      err << "error: thresholds must be >= 0\n";
      return int{kExitDomain};
    }
    const std::vector<fs::path> files = list_json_files(opts.in_dir);
    if (files.empty()) {
      err << "error: no scenario JSON files in " << opts.in_dir.string() << '\n';
      return int{kExitDomain};
    }
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) {
      err << "error: cannot create " << opts.out_dir.string() << ": " << ec.message() << '\n';
      return int{kExitIo};
    }
    PrepStats total;
    std::size_t skipped = 0;
    for (const fs::path& file : files) {
      const std::string text = read_text_file(file);
      Scenario scenario;
      std::vector<std::string> warnings;
      try {
        scenario = parse_scenario(text, &warnings);
        const ValidationReport report = validate_scenario(scenario);
        if (report.has_errors()) {
          throw ScenarioError(ScenarioError::Code::kInvalidValue,
                              "validation failed\n" + report.summary());
        }
      } catch (const ScenarioError& e) {
        err << file.filename().string() << ": " << e.what() << '\n';
        if (!opts.skip_bad) return int{kExitDomain};
        ++skipped;
        continue;
      }
      for (const std::string& w : warnings) err << file.filename().string() << ": warning: " << w << '\n';
      const PreparedScenario prepared =
          preprocess(scenario, opts.decimate_eps, opts.controllable_threshold);
      write_text_file(opts.out_dir / file.filename(), serialize_prepared(prepared));
      const PrepStats& st = prepared.stats;
      out << file.filename().string() << ": points " << st.n_road_points_before << " -> "
          << st.n_road_points_after << " (" << ratio_text(st.reduction())
          << "x), controllable " << st.n_controllable << "/" << st.n_objects << '\n';
      total.n_road_points_before += st.n_road_points_before;
      total.n_road_points_after += st.n_road_points_after;
      total.n_controllable += st.n_controllable;
      total.n_objects += st.n_objects;
    }
    out << "total: " << files.size() - skipped << " written, " << skipped << " skipped, points "
        << total.n_road_points_before << " -> " << total.n_road_points_after << " ("
        << ratio_text(total.reduction()) << "x), controllable " << total.n_controllable << "/"
        << total.n_objects << '\n';
    return int{kExitOk};
  });
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err,
              std::vector<ThroughputReport>* reports) {
  return guarded(err, [&] {
    SimConfig cfg = load_config(opts.config);
    cfg.obs.mode = opts.obs;
    cfg.seed = opts.seed;
    const auto spec = PolicySpec::parse(opts.policy);
    if (!spec || spec->kind == PolicyKind::kGoalSeek) {
      err << "error: unknown bench policy '" << opts.policy << "'\n";
      return int{kExitDomain};
    }
    // Expert actions are invertible-model actions.
    if (spec->kind == PolicyKind::kReplay) cfg.dynamics = DynamicsModel::kInvertible;
    if (opts.steps == 0 || opts.worlds.empty()) {
      err << "error: --steps and --worlds must be positive\n";
      return int{kExitDomain};
    }
    const std::vector<fs::path> files = scenario_files(opts.scenarios);
    if (files.empty()) {
      err << "error: no scenario JSON files in " << opts.scenarios.string() << '\n';
      return int{kExitDomain};
    }
    std::vector<PreparedScenario> scenarios;
    for (const fs::path& f : files) scenarios.push_back(load_prepared(f));

    ThroughputReport peak;
    for (const std::size_t w : opts.worlds) {
      if (w == 0) {
        err << "error: world counts must be positive\n";
        return int{kExitDomain};
      }
      double bytes = 0.0;
      for (std::size_t k = 0; k < w; ++k) bytes += estimate_world_bytes(scenarios[k % scenarios.size()], cfg);
      if (bytes > opts.memory_cap_mb * 1024.0 * 1024.0) {
        err << "error: " << w << " worlds need about " << static_cast<long long>(bytes / 1048576.0)
            << " MiB, above the " << opts.memory_cap_mb << " MiB cap\n";
        return int{kExitDomain};
      }
      const ThroughputReport r = benchmark(scenarios, cfg, w, opts.steps, *spec, opts.workers);
      out << "worlds=" << r.worlds << " steps=" << r.steps << " agents=" << r.total_agents
          << " controlled=" << r.controlled_agents << " elapsed_s=" << format_double(r.elapsed_s)
          << " asps=" << static_cast<long long>(r.asps) << " casps=" << static_cast<long long>(r.casps)
          << '\n';
      if (opts.csv) append_csv(*opts.csv, kBenchmarkCsvHeader, benchmark_csv_row(r));
      if (reports) reports->push_back(r);
      if (r.asps > peak.asps) peak = r;
    }
    out << "peak asps=" << static_cast<long long>(peak.asps)
        << " casps=" << static_cast<long long>(peak.casps) << " at worlds=" << peak.worlds << '\n';
    return int{kExitOk};
  });
}

int cmd_rollout(const RolloutOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto spec = PolicySpec::parse(opts.policy);
    if (!spec) {
      err << "error: unknown policy '" << opts.policy << "'\n";
      return int{kExitDomain};
    }
    SimConfig cfg = load_config(opts.config);
    cfg.seed = opts.seed;
    if (spec->kind == PolicyKind::kReplay) cfg.dynamics = DynamicsModel::kInvertible;

    auto prepared = std::make_shared<const PreparedScenario>(load_prepared(opts.scenario));
    SimBatch batch({prepared}, cfg, 1);
    Policy policy(*spec, opts.seed);
    std::vector<Action> actions(batch.total_controlled());
    const World& world = batch.world(0);

    Trajectory tr;
    tr.scenario = prepared->base;
    tr.policy = spec->to_string();
    auto record = [&] {
      TrajectoryFrame frame;
      frame.t = world.step_count();
      for (std::size_t i = 0; i < world.num_agents(); ++i) {
        const AgentState& s = world.agent_state(i);
        const AgentFlags flags = world.agent_flags(i);
        frame.agents.push_back({prepared->base.objects[i].id, s.position, s.heading, s.speed,
                                flags.present && !flags.removed});
      }
      tr.frames.push_back(std::move(frame));
    };

    batch.reset();
    record();
    while (!world.done()) {
      policy.act(batch, actions);
      batch.step(actions);
      record();
    }
    tr.metrics = compute_metrics(batch.episodes());
    write_with_parents(opts.out, serialize_trajectory(tr));
    if (opts.metrics_csv) {
      for (const EpisodeRecord& e : batch.episodes()) {
        append_csv(*opts.metrics_csv, kMetricsCsvHeader, metrics_csv_row(e));
      }
    }
    out << "steps=" << world.step_count() << " controlled=" << tr.metrics.controlled_agents
        << " goal_rate=" << format_double(tr.metrics.goal_rate)
        << " veh_collision_rate=" << format_double(tr.metrics.veh_collision_rate)
        << " offroad_rate=" << format_double(tr.metrics.offroad_rate) << '\n';
    return int{kExitOk};
  });
}

int cmd_render(const RenderOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string text = read_text_file(opts.in);
    std::vector<RoadElement> roads;
    std::vector<RenderAgent> agents;
    const std::size_t step = opts.step.value_or(0);
    auto out_of_range = [&](std::size_t limit) {
      err << "error: --step " << step << " out of range (" << limit << " steps available)\n";
      return int{kExitDomain};
    };

    if (text.find(kTrajectoryFormat) != std::string::npos) {
      const Trajectory tr = parse_trajectory(text);
      if (step >= tr.frames.size()) return out_of_range(tr.frames.size());
      roads = tr.scenario.roads;
      const TrajectoryFrame& frame = tr.frames[step];
      for (std::size_t i = 0; i < frame.agents.size() && i < tr.scenario.objects.size(); ++i) {
        const AgentPose& a = frame.agents[i];
        if (!a.present) continue;
        const ObjectLog& obj = tr.scenario.objects[i];
        agents.push_back({obj.id, obj.kind,
                          {a.position, 0.5 * obj.length, 0.5 * obj.width, a.heading}, obj.goal});
      }
    } else {
      Scenario scenario;
      if (is_prepared_document(text)) {
        PreparedScenario p = parse_prepared(text);
        scenario = std::move(p.base);
        roads = std::move(p.decimated_roads);
      } else {
        scenario = parse_scenario(text);
        roads = scenario.roads;
      }
      if (step >= static_cast<std::size_t>(scenario.num_steps)) {
        return out_of_range(static_cast<std::size_t>(scenario.num_steps));
      }
      for (const ObjectLog& obj : scenario.objects) {
        if (step >= obj.states.size() || !obj.states[step].valid) continue;
        const LoggedStep& s = obj.states[step];
        agents.push_back({obj.id, obj.kind,
                          {s.position, 0.5 * obj.length, 0.5 * obj.width, s.heading}, obj.goal});
      }
    }
    write_text_file(opts.out, render_svg(roads, agents));
    out << "wrote " << opts.out.string() << " (" << agents.size() << " agents, " << roads.size()
        << " roads)\n";
    return int{kExitOk};
  });
}

int cmd_synth(const SynthOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto map = parse_map_template(opts.template_name);
    if (!map) {
      err << "error: unknown template '" << opts.template_name << "'\n";
      return int{kExitDomain};
    }
    SyntheticSpec spec;
    spec.map = *map;
    spec.n_agents = opts.agents;
    spec.seed = opts.seed;
    const Scenario s = generate_synthetic(spec);
    write_with_parents(opts.out, serialize_scenario(s, 1));
    out << "wrote " << opts.out.string() << " (" << s.objects.size() << " agents, "
        << s.roads.size() << " roads)\n";
    return int{kExitOk};
  });
}

}  // namespace drivesim::cli
