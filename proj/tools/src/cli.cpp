#include <ostream>

#include "CLI11.hpp"
#include "drivesim/cli/cli.hpp"

namespace drivesim::cli {

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Batched multi-agent driving simulator", "drivesim"};
  app.require_subcommand(1);

  PreprocessOptions pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Decimate roads and mark controllable agents");
  pre_cmd->add_option("--in", pre.in_dir, "Directory of scenario JSON files")->required();
  pre_cmd->add_option("--out", pre.out_dir, "Output directory")->required();
  pre_cmd->add_option("--decimate-eps", pre.decimate_eps, "Decimation area threshold (m^2)");
  pre_cmd->add_option("--controllable-threshold", pre.controllable_threshold,
                      "Minimum start-goal distance (m)");
  pre_cmd->add_flag("--skip-bad", pre.skip_bad, "Skip files that fail to parse or validate");

  BenchOptions bench;
  std::string bench_obs = "radial";
  auto* bench_cmd = app.add_subcommand("bench", "Measure agent steps per second");
  bench_cmd->add_option("--scenarios", bench.scenarios, "Scenario directory or file")->required();
  bench_cmd->add_option("--worlds", bench.worlds, "Comma-separated world counts")->delimiter(',');
  bench_cmd->add_option("--steps", bench.steps, "Steps per measurement");
  bench_cmd->add_option("--obs", bench_obs, "radial | lidar | view_cone")
      ->check(CLI::IsMember({"radial", "lidar", "view_cone"}));
  bench_cmd->add_option("--policy", bench.policy, "random | constant | replay");
  bench_cmd->add_option("--csv", bench.csv, "Append rows to this CSV file");
  bench_cmd->add_option("--seed", bench.seed, "Seed");
  bench_cmd->add_option("--workers", bench.workers, "Worker threads (0: all cores)");
  bench_cmd->add_option("--config", bench.config, "Simulator config file");
  bench_cmd->add_option("--memory-cap-mb", bench.memory_cap_mb, "Refuse larger batches");

  RolloutOptions roll;
  auto* roll_cmd = app.add_subcommand("rollout", "Run one episode and write the trajectory");
  roll_cmd->add_option("--scenario", roll.scenario, "Scenario or prepared JSON")->required();
  roll_cmd->add_option("--policy", roll.policy, "replay | goal_seek | random | constant:A:S");
  roll_cmd->add_option("--out", roll.out, "Trajectory JSON output")->required();
  roll_cmd->add_option("--seed", roll.seed, "Seed");
  roll_cmd->add_option("--config", roll.config, "Simulator config file");
  roll_cmd->add_option("--metrics-csv", roll.metrics_csv, "Append episode metrics here");

  RenderOptions render;
  auto* render_cmd = app.add_subcommand("render", "Write a bird's-eye SVG");
  render_cmd->add_option("--in", render.in, "Scenario, prepared, or trajectory JSON")->required();
  render_cmd->add_option("--step", render.step, "Step to draw (default 0)");
  render_cmd->add_option("--out", render.out, "SVG output")->required();

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario");
  synth_cmd->add_option("--template", synth.template_name,
                        "straight_road | intersection | parking_lot")->required();
  synth_cmd->add_option("--agents", synth.agents, "Number of agents")->required();
  synth_cmd->add_option("--seed", synth.seed, "Seed");
  synth_cmd->add_option("--out", synth.out, "Scenario JSON output")->required();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitDomain;
  }

  if (*pre_cmd) return cmd_preprocess(pre, out, err);
  if (*bench_cmd) {
    bench.obs = *parse_obs_mode(bench_obs);
    return cmd_bench(bench, out, err);
  }
  if (*roll_cmd) return cmd_rollout(roll, out, err);
  if (*render_cmd) return cmd_render(render, out, err);
  return cmd_synth(synth, out, err);
}

}  // namespace drivesim::cli
