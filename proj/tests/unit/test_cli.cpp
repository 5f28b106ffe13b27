#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <regex>
#include <sstream>

#include "drivesim/cli/cli.hpp"
#include "drivesim/metrics.hpp"
#include "drivesim/random.hpp"
#include "drivesim/scenario_io.hpp"
#include "drivesim/synthetic.hpp"

namespace drivesim::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("drivesim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "drivesim");
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  fs::path write_synth(const std::string& name, MapTemplate t, std::size_t n, std::uint64_t seed,
                       const fs::path& sub = "raw") {
    fs::create_directories(dir_ / sub);
    const fs::path p = dir_ / sub / (name + ".json");
    write_text_file(p, serialize_scenario(generate_synthetic({t, n, seed})));
    return p;
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, PreprocessThreeFiles) {
  write_synth("a", MapTemplate::kStraightRoad, 4, 1);
  write_synth("b", MapTemplate::kIntersection, 4, 2);
  write_synth("c", MapTemplate::kParkingLot, 6, 3);
  ASSERT_EQ(run_cli({"preprocess", "--in", (dir_ / "raw").string(), "--out", (dir_ / "prep").string()}),
            kExitOk)
      << err_.str();
  EXPECT_EQ(list_json_files(dir_ / "prep").size(), 3u);
  for (const auto& f : list_json_files(dir_ / "prep")) {
    EXPECT_TRUE(is_prepared_document(read_text_file(f)));
  }
  EXPECT_NE(out_.str().find("a.json: points"), std::string::npos) << out_.str();
}

TEST_F(CliTest, PreprocessCorruptFile) {
  write_synth("good", MapTemplate::kStraightRoad, 2, 1);
  write_text_file(dir_ / "raw" / "broken.json", "{\"objects\": [");
  const std::vector<std::string> args = {"preprocess", "--in", (dir_ / "raw").string(), "--out",
                                         (dir_ / "prep").string()};
  EXPECT_EQ(run_cli(args), kExitDomain);
  EXPECT_NE(err_.str().find("broken.json"), std::string::npos) << err_.str();
  auto skip = args;
  skip.push_back("--skip-bad");
  EXPECT_EQ(run_cli(skip), kExitOk) << err_.str();
  EXPECT_EQ(list_json_files(dir_ / "prep").size(), 1u);
}

TEST_F(CliTest, PreprocessReportsReduction) {
  write_synth("s", MapTemplate::kStraightRoad, 2, 5);
  ASSERT_EQ(run_cli({"preprocess", "--in", (dir_ / "raw").string(), "--out", (dir_ / "prep").string()}),
            kExitOk);
  const PreparedScenario p = parse_prepared(read_text_file(dir_ / "prep" / "s.json"));
  EXPECT_GE(p.stats.reduction(), 5.0);
  // The printed counts agree with a recount of the written geometry.
  std::size_t after = 0;
  for (const auto& r : p.decimated_roads) after += r.geometry.size();
  EXPECT_EQ(after, p.stats.n_road_points_after);
  EXPECT_NE(out_.str().find("-> " + std::to_string(after) + " "), std::string::npos) << out_.str();
}

TEST_F(CliTest, MissingInputDirIsIoError) {
  EXPECT_EQ(run_cli({"preprocess", "--in", (dir_ / "nope").string(), "--out", (dir_ / "x").string()}),
            kExitIo);
}

TEST_F(CliTest, BadFlagsAreDomainErrors) {
  EXPECT_EQ(run_cli({"bench"}), kExitDomain);
  EXPECT_EQ(run_cli({"bench", "--scenarios", "x", "--obs", "sonar"}), kExitDomain);
  EXPECT_EQ(run_cli({"--help"}), kExitOk);
}

TEST_F(CliTest, BenchWritesOneRowPerWorldCount) {
  write_synth("s", MapTemplate::kStraightRoad, 3, 1);
  write_synth("i", MapTemplate::kIntersection, 5, 1);
  const fs::path csv = dir_ / "bench.csv";
  ASSERT_EQ(run_cli({"bench", "--scenarios", (dir_ / "raw").string(), "--worlds", "1,2,4,8", "--steps",
                     "20", "--csv", csv.string(), "--workers", "2"}),
            kExitOk)
      << err_.str();
  std::istringstream lines(read_text_file(csv));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, kBenchmarkCsvHeader);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    double w, s, total, ctrl, elapsed, asps, casps;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &w, &s, &total, &ctrl, &elapsed,
                          &asps, &casps),
              7);
    EXPECT_EQ(asps, s * total / elapsed) << line;
    EXPECT_LE(casps, asps);
  }
  EXPECT_EQ(rows, 4);
}

TEST_F(CliTest, BenchLidarAndRadialBothComplete) {
  write_synth("s", MapTemplate::kIntersection, 8, 1);
  for (const char* mode : {"radial", "lidar", "view_cone"}) {
    std::vector<ThroughputReport> reports;
    BenchOptions opts;
    opts.scenarios = dir_ / "raw";
    opts.worlds = {2};
    opts.steps = 10;
    opts.obs = *parse_obs_mode(mode);
    opts.workers = 1;
    ASSERT_EQ(cmd_bench(opts, out_, err_, &reports), kExitOk) << mode << err_.str();
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_EQ(reports[0].asps, 10.0 * reports[0].total_agents / reports[0].elapsed_s);
  }
}

TEST_F(CliTest, BenchMemoryCap) {
  write_synth("s", MapTemplate::kStraightRoad, 2, 1);
  EXPECT_EQ(run_cli({"bench", "--scenarios", (dir_ / "raw").string(), "--worlds", "100000",
                     "--memory-cap-mb", "1"}),
            kExitDomain);
}

TEST_F(CliTest, RolloutReplayAndGoalSeek) {
  const fs::path scen = write_synth("s", MapTemplate::kStraightRoad, 8, 2);
  for (const char* policy : {"replay", "goal_seek"}) {
    const fs::path out = dir_ / (std::string(policy) + ".json");
    ASSERT_EQ(run_cli({"rollout", "--scenario", scen.string(), "--policy", policy, "--out", out.string()}),
              kExitOk)
        << err_.str();
    const Trajectory tr = parse_trajectory(read_text_file(out));
    EXPECT_EQ(tr.metrics.goal_rate, 1.0) << policy;
    EXPECT_EQ(tr.metrics.veh_collision_rate, 0.0) << policy;
    EXPECT_FALSE(tr.frames.empty());
    EXPECT_NE(out_.str().find("goal_rate=1"), std::string::npos) << out_.str();
  }
}

TEST_F(CliTest, RolloutConstantIsDeterministic) {
  const fs::path scen = write_synth("s", MapTemplate::kStraightRoad, 2, 2);
  const fs::path a = dir_ / "a.json";
  const fs::path b = dir_ / "b.json";
  ASSERT_EQ(run_cli({"rollout", "--scenario", scen.string(), "--policy", "constant:0:0", "--out", a.string()}),
            kExitOk);
  ASSERT_EQ(run_cli({"rollout", "--scenario", scen.string(), "--policy", "constant:0:0", "--out", b.string()}),
            kExitOk);
  EXPECT_EQ(read_text_file(a), read_text_file(b));
  // Coasting keeps the start speed.
  const Trajectory tr = parse_trajectory(read_text_file(a));
  ASSERT_GE(tr.frames.size(), 3u);
  EXPECT_NEAR(tr.frames[2].agents[0].speed, tr.frames[0].agents[0].speed, 1e-12);
}

TEST_F(CliTest, RolloutMetricsCsvAndBadPolicy) {
  const fs::path scen = write_synth("s", MapTemplate::kStraightRoad, 2, 2);
  const fs::path csv = dir_ / "m.csv";
  ASSERT_EQ(run_cli({"rollout", "--scenario", scen.string(), "--out", (dir_ / "t.json").string(),
                     "--metrics-csv", csv.string()}),
            kExitOk);
  EXPECT_EQ(read_text_file(csv).rfind(std::string(kMetricsCsvHeader) + "\n", 0), 0u);
  EXPECT_EQ(run_cli({"rollout", "--scenario", scen.string(), "--policy", "warp", "--out",
                     (dir_ / "t.json").string()}),
            kExitDomain);
  EXPECT_EQ(run_cli({"rollout", "--scenario", (dir_ / "missing.json").string(), "--out",
                     (dir_ / "t.json").string()}),
            kExitIo);
}

TEST_F(CliTest, TrajectoryRoundTrip) {
  const fs::path scen = write_synth("s", MapTemplate::kIntersection, 4, 2);
  ASSERT_EQ(run_cli({"rollout", "--scenario", scen.string(), "--out", (dir_ / "t.json").string()}), kExitOk);
  const std::string text = read_text_file(dir_ / "t.json");
  EXPECT_EQ(serialize_trajectory(parse_trajectory(text)), text);
}

TEST_F(CliTest, RenderIsDeterministicAndHonorsStep) {
  const fs::path scen = write_synth("s", MapTemplate::kIntersection, 4, 2);
  ASSERT_EQ(run_cli({"rollout", "--scenario", scen.string(), "--out", (dir_ / "t.json").string()}), kExitOk);
  for (const fs::path& in : {scen, dir_ / "t.json"}) {
    ASSERT_EQ(run_cli({"render", "--in", in.string(), "--out", (dir_ / "a.svg").string(), "--step", "3"}),
              kExitOk)
        << err_.str();
    ASSERT_EQ(run_cli({"render", "--in", in.string(), "--out", (dir_ / "b.svg").string(), "--step", "3"}),
              kExitOk);
    EXPECT_EQ(read_text_file(dir_ / "a.svg"), read_text_file(dir_ / "b.svg"));
  }
  EXPECT_EQ(run_cli({"render", "--in", scen.string(), "--out", (dir_ / "c.svg").string(), "--step", "9999"}),
            kExitDomain);
}

TEST(RenderSvg, EmptyRoadsOnlyAgentsAndGoals) {
  const std::vector<RenderAgent> agents = {{1, ObjectKind::kVehicle, {{1, 2}, 2, 1, 0.3}, {10, 2}}};
  const std::string svg = render_svg({}, agents);
  EXPECT_EQ(svg.find("polyline"), std::string::npos);
  EXPECT_NE(svg.find("<polygon class=\"agent vehicle\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"goal"), std::string::npos);
}

TEST(RenderSvg, CornersParseBackToBoxMath) {
  Rng rng(701);
  std::vector<RenderAgent> agents;
  for (int i = 0; i < 20; ++i) {
    agents.push_back({i, ObjectKind::kVehicle,
                      {{rng.uniform(-50, 50), rng.uniform(-50, 50)}, rng.uniform(0.5, 3),
                       rng.uniform(0.3, 1.2), rng.uniform(-kPi, kPi)},
                      {0, 0}});
  }
  const std::vector<RoadElement> roads = {{1, RoadKind::kLane, {{-60, 0}, {60, 0}}}};
  const std::string svg = render_svg(roads, agents);
  const std::regex poly("<polygon class=\"agent [a-z]+\" data-id=\"(-?\\d+)\" points=\"([^\"]+)\"");
  int found = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
    const int id = std::stoi((*it)[1]);
    const auto corners = agents[id].box.corners();
    std::istringstream pts((*it)[2].str());
    std::string tok;
    for (int k = 0; k < 4; ++k) {
      ASSERT_TRUE(pts >> tok);
      double x = 0, y = 0;
      ASSERT_EQ(std::sscanf(tok.c_str(), "%lf,%lf", &x, &y), 2);
      EXPECT_NEAR(x, corners[k].x, 5e-7);
      EXPECT_NEAR(y, corners[k].y, 5e-7);
    }
    ++found;
  }
  EXPECT_EQ(found, 20);
}

}  // namespace
}  // namespace drivesim::cli
