#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "camplace/room.hpp"
#include "camplace/serialization.hpp"

using namespace camplace;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidParams;
}

RunConfig tiny_run() {
  RunConfig cfg;
  cfg.room = RoomParams{};
  cfg.strategy = Strategy::kEE;
  cfg.sampling_budget = 80;
  cfg.iterations = 5;
  cfg.budget = 2;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(Occupancy, RunLengthExamples) {
  EXPECT_EQ(encode_occupancy({0, 0, 0, 1, 1, 0}), "3F2C1F");
  EXPECT_EQ(encode_occupancy({}), "");
  EXPECT_EQ(decode_occupancy("3F2C1F"), (std::vector<std::uint8_t>{0, 0, 0, 1, 1, 0}));
  EXPECT_EQ(decode_occupancy("12C").size(), 12u);
  EXPECT_THROW(decode_occupancy("F3"), Error);
  EXPECT_THROW(decode_occupancy("3X"), Error);
  EXPECT_THROW(decode_occupancy("3F2"), Error);
}

TEST(GridJson, RoundTrip) {
  RoomParams p;
  p.length = 14;
  p.num_walls = 2;
  const auto grid = voxelize(generate_room(p), 1.0);
  const auto back = grid_from_json(Json::parse(grid_to_json(grid).dump()));
  EXPECT_EQ(back.free_count(), grid.free_count());
  EXPECT_EQ(back.occupancy(), grid.occupancy());
  EXPECT_EQ(back.dims(), grid.dims());
  for (VoxelId v = 0; v < grid.free_count(); v += 17) EXPECT_EQ(back.free_cell(v), grid.free_cell(v));
}

TEST(GridJson, MismatchedCountIsAParseError) {
  RoomParams p;
  auto j = grid_to_json(voxelize(generate_room(p), 1.0));
  j["free_count"] = 3;
  EXPECT_EQ(code_of([&] { grid_from_json(j); }), ErrorCode::kParse);
}

TEST(InstanceJson, RoundTrip) {
  CoverageInstance inst;
  inst.universe = 6;
  inst.budget = 2.5;
  inst.locale_radius = 1;
  inst.sets = {{0, 1, 2}, {3, 5}};
  inst.costs = {1.0, 1.5};
  inst.cells = {{0, 1, 2}, {4, 4, 4}};
  const auto back = instance_from_json(Json::parse(instance_to_json(inst).dump()));
  EXPECT_EQ(back.universe, inst.universe);
  EXPECT_EQ(back.budget, inst.budget);
  EXPECT_EQ(back.locale_radius, inst.locale_radius);
  EXPECT_EQ(back.sets, inst.sets);
  EXPECT_EQ(back.costs, inst.costs);
  EXPECT_EQ(back.cells, inst.cells);
}

TEST(InstanceJson, InvalidContentIsRejected) {
  const auto j = Json::parse(R"({"universe": 3, "budget": 1, "candidates": [{"cell": [0,0,0], "voxels": [5]}]})");
  EXPECT_THROW(instance_from_json(j), Error);
  EXPECT_EQ(code_of([] { instance_from_json(Json::parse(R"({"budget": 1})")); }), ErrorCode::kParse);
}

TEST(RunConfigJson, AppliesKnownKeys) {
  const auto cfg = parse_run_config(Json::parse(R"({
    "scenario": "corridor",
    "scene": {"room": {"length": 20, "num_walls": 3, "wall_orient": "same-side"}},
    "camera": {"hfov_deg": 90, "dof_max": null},
    "strategy": "TUS",
    "tus": {"f_unc": 0.5, "super_size": 4},
    "sampling_budget": 400,
    "iterations": 5,
    "budget": 3,
    "solver": {"kind": "greedy", "node_limit": null, "time_limit_ms": 250},
    "seed": 12
  })"));
  EXPECT_EQ(cfg.scenario, "corridor");
  ASSERT_TRUE(cfg.room);
  EXPECT_EQ(cfg.room->length, 20);
  EXPECT_EQ(cfg.room->wall_orient, WallOrient::kSameSide);
  EXPECT_NEAR(cfg.intrinsics.hfov, deg_to_rad(90), 1e-12);
  EXPECT_TRUE(std::isinf(cfg.intrinsics.dof_max));
  EXPECT_EQ(cfg.strategy, Strategy::kTUS);
  EXPECT_EQ(cfg.tus.f_unc, 0.5);
  EXPECT_EQ(cfg.tus.super_size, 4);
  EXPECT_EQ(cfg.solver, SolverKind::kGreedy);
  EXPECT_FALSE(cfg.limits.node_limit);
  EXPECT_DOUBLE_EQ(*cfg.limits.time_limit_seconds, 0.25);
  EXPECT_EQ(cfg.seed, 12u);
}

TEST(RunConfigJson, RejectsBadInput) {
  for (const char* text : {
           R"({"bogus": 1})",
           R"({"camera": {"fov": 60}})",
           R"({"scene": {"room": {"length": 10, "colour": "red"}}})",
           R"({"scene": {"room": {}, "mesh": "a.obj"}})",
           R"({"scene": {"room": {"z_wall_edge_ratio": 1.5}}})",
           R"({"strategy": "XX"})",
           R"({"solver": {"kind": "magic"}})",
           R"({"iterations": 0})",
           R"({"budget": "four"})",
           R"([1, 2])",
       }) {
    EXPECT_EQ(code_of([&] { parse_run_config(Json::parse(text)); }), ErrorCode::kConfig) << text;
  }
}

TEST(BenchmarkConfigJson, ExpandsScenariosAndStrategies) {
  const auto b = parse_benchmark_config(Json::parse(R"({
    "base": {"sampling_budget": 160, "iterations": 4},
    "scenarios": [{"scenario": "a"}, {"scenario": "b", "budget": 2}],
    "strategies": ["RS", "EE", "TUS"],
    "trials": 3
  })"));
  ASSERT_EQ(b.runs.size(), 6u);
  EXPECT_EQ(b.trials, 3u);
  EXPECT_EQ(b.runs[0].scenario, "a");
  EXPECT_EQ(b.runs[5].scenario, "b");
  EXPECT_EQ(b.runs[5].strategy, Strategy::kTUS);
  EXPECT_EQ(b.runs[5].budget, 2.0);
  EXPECT_EQ(b.runs[0].sampling_budget, 160u);
}

TEST(BenchmarkConfigJson, DuplicateScenarioNames) {
  EXPECT_EQ(code_of([] {
              parse_benchmark_config(Json::parse(R"({"scenarios": [{"scenario": "a"}, {"scenario": "a"}]})"));
            }),
            ErrorCode::kConfig);
}

TEST(BenchmarkCsv, BaselineShowsDash) {
  auto rs = tiny_run();
  rs.strategy = Strategy::kRS;
  const auto res = benchmark({rs, tiny_run()}, 2);
  std::ostringstream csv;
  write_benchmark_csv(csv, res);
  std::istringstream in(csv.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 1u + 4u + 2u);
  EXPECT_EQ(lines[0].rfind("kind,scenario,strategy", 0), 0u);
  EXPECT_EQ(lines[5].rfind("aggregate,room,RS,", 0), 0u);
  EXPECT_EQ(lines[5].substr(lines[5].size() - 4), ",-,-");
  EXPECT_NE(lines[6].substr(lines[6].size() - 4), ",-,-");
}

TEST(ReportJson, HasNoTimingsAndIsStable) {
  const auto cfg = tiny_run();
  const auto a = report_to_json(run(cfg)).dump(2);
  const auto b = report_to_json(run(cfg)).dump(2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("seconds"), std::string::npos);
  const auto j = Json::parse(a);
  EXPECT_EQ(j["iterations"].size(), 5u);
  EXPECT_EQ(j["strategy"], "EE");
}

TEST(TrajectoryCsv, OneRowPerIteration) {
  const auto rep = run(tiny_run());
  std::ostringstream out;
  write_trajectory_csv(out, rep);
  const auto text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
}

TEST(Ply, HeaderAndCounts) {
  RoomParams p;
  const auto grid = voxelize(generate_room(p), 1.0);
  std::ostringstream out;
  write_ply(out, grid, {0, 1, 2}, {{5, {1, 0, 0}}});
  const auto text = out.str();
  EXPECT_EQ(text.rfind("ply\nformat ascii 1.0\n", 0), 0u);
  EXPECT_NE(text.find("element vertex 252\n"), std::string::npos);
  EXPECT_NE(text.find("element edge 1\n"), std::string::npos);
  const auto body = text.substr(text.find("end_header\n") + 11);
  EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 253);
  EXPECT_NE(body.find(" 2\n250 251\n"), std::string::npos);
}
