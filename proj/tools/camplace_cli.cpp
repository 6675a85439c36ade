// camplace: camera placement by iterative sampling and coverage optimization.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "camplace/camplace.hpp"

namespace fs = std::filesystem;
using namespace camplace;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
}

// Relative mesh paths are taken relative to the config file.
void resolve_mesh(RunConfig& cfg, const fs::path& config_path) {
  if (cfg.room || cfg.mesh_path.empty()) return;
  const fs::path mesh(cfg.mesh_path);
  if (mesh.is_relative()) cfg.mesh_path = (config_path.parent_path() / mesh).string();
}

fs::path output_dir(const Json& doc, const std::string& flag) {
  fs::path dir = flag;
  if (dir.empty()) dir = doc.value("output", Json::object()).value("dir", std::string("."));
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
};

int cmd_generate_room(const RoomParams& p, double voxel_size, const std::string& emit_obj,
                      const std::string& out_dir) {
  const TriangleMesh mesh = generate_room(p);
  const VoxelGrid grid = voxelize(mesh, voxel_size);
  std::ostringstream obj;
  write_obj(obj, mesh);
  if (!emit_obj.empty()) write_file(emit_obj, obj.str());
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "room.obj", obj.str());
    write_file(fs::path(out_dir) / "grid.json", grid_to_json(grid).dump() + "\n");
  }
  std::printf("triangles: %zu\nfree voxels: %zu\n", mesh.triangles.size(), grid.free_count());
  return 0;
}

int cmd_solve(const fs::path& config_path, const Common& c, bool ply) {
  const Json doc = read_json_file(config_path);
  RunConfig cfg = parse_run_config(doc);
  resolve_mesh(cfg, config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  ply = ply || doc.value("output", Json::object()).value("ply", false);

  const auto t0 = std::chrono::steady_clock::now();
  const Scene scene = build_scene(cfg);
  const double scene_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RunReport rep = run(cfg, scene);
  rep.scene_seconds = scene_seconds;

  const fs::path dir = output_dir(doc, c.out);
  write_file(dir / "report.json", report_to_json(rep).dump(2) + "\n");
  write_file(dir / "timings.json", timings_to_json(rep).dump(2) + "\n");
  std::ostringstream traj;
  write_trajectory_csv(traj, rep);
  write_file(dir / "trajectory.csv", traj.str());
  if (ply) {
    std::vector<CameraConfig> cams;
    for (const auto& s : rep.selected) cams.push_back(s.config);
    std::ostringstream out;
    write_ply(out, scene.grid, rep.solution.covered, cams);
    write_file(dir / "coverage.ply", out.str());
  }
  std::printf("%s %s seed %llu: coverage %zu / %zu free voxels (%.2f%%), %zu cameras, %s\n",
              rep.scenario.c_str(), to_string(rep.strategy), static_cast<unsigned long long>(rep.seed),
              rep.final_coverage(), rep.free_voxels, 100.0 * rep.coverage_fraction(), rep.selected.size(),
              to_string(rep.solution.status));
  return 0;
}

int cmd_benchmark(const fs::path& config_path, const Common& c) {
  const Json doc = read_json_file(config_path);
  BenchmarkConfig bc = parse_benchmark_config(doc);
  for (auto& cfg : bc.runs) {
    resolve_mesh(cfg, config_path);
    if (c.seed) cfg.seed = *c.seed;
    if (c.threads) cfg.threads = *c.threads;
  }
  const BenchmarkResult res = benchmark(bc.runs, bc.trials);
  const fs::path dir = output_dir(doc, c.out);
  std::ostringstream table, traj, timings;
  write_benchmark_csv(table, res);
  write_benchmark_trajectory_csv(traj, res);
  write_benchmark_timings_csv(timings, res);
  write_file(dir / "benchmark.csv", table.str());
  write_file(dir / "benchmark_trajectory.csv", traj.str());
  write_file(dir / "benchmark_timings.csv", timings.str());
  for (const auto& row : res.rows) {
    std::printf("%-16s %-4s mean %.2f%% [%.2f, %.2f] improvement %s\n", row.scenario.c_str(),
                to_string(row.strategy), row.mean, row.min, row.max,
                row.improvement_pct ? (std::to_string(*row.improvement_pct) + "%").c_str() : "-");
  }
  return 0;
}

// Compares the flood-fill view against the brute-force oracle on random
// configurations of the configured scene.
int cmd_visibility_check(const fs::path& config_path, const Common& c, std::size_t samples) {
  const Json doc = read_json_file(config_path);
  RunConfig cfg = parse_run_config(doc);
  resolve_mesh(cfg, config_path);
  if (c.seed) cfg.seed = *c.seed;
  const Scene scene = build_scene(cfg);
  Rng rng(derive_seed(cfg.seed, 0, "visibility-check"));
  const ConfigBatch batch = sample_random_configurations(samples, scene.positions, 1, rng);
  std::size_t exact = 0, unsound = 0;
  double min_j = 1.0, sum_j = 0.0;
  for (const auto& cand : batch.items) {
    const VoxelSet fill = calculate_camera_view(scene.mesh, scene.grid, cand.config, cfg.intrinsics);
    const VoxelSet oracle = brute_force_view(scene.mesh, scene.grid, cand.config, cfg.intrinsics);
    const double j = jaccard(fill, oracle);
    min_j = std::min(min_j, j);
    sum_j += j;
    exact += fill == oracle;
    unsound += !std::includes(oracle.begin(), oracle.end(), fill.begin(), fill.end());
  }
  const Json out{{"configs", batch.size()},
                 {"exact_matches", exact},
                 {"not_subset_of_oracle", unsound},
                 {"min_jaccard", min_j},
                 {"mean_jaccard", batch.empty() ? 1.0 : sum_j / batch.size()}};
  std::printf("%s\n", out.dump(2).c_str());
  return unsound == 0 ? 0 : kExitRuntime;
}

int cmd_theory(std::uint64_t N, std::uint64_t beta, std::uint64_t n, double p_count, double epsilon) {
  Json out{{"N", N}, {"beta", beta}, {"n", n}};
  const auto p = prob_optimal_in_sample(n, N, beta);
  out["prob_optimal_in_sample"] = {{"exact", p.exact}, {"bound", p.bound}};
  out["expected_samples_to_optimal"] =
      beta >= 1 ? Json(expected_samples_to_optimal(N, beta)) : Json(nullptr);
  out["config_space_cardinality_bound"] = config_space_cardinality_bound(p_count, epsilon);
  std::printf("%s\n", out.dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camera placement by iterative sampling and coverage optimization"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Override the master seed");
    sub->add_option("--threads", common.threads, "Visibility worker threads (0: all cores)");
    sub->add_option("--out", common.out, "Output directory");
  };

  RoomParams room;
  double voxel_size = 1.0;
  std::string emit_obj, orient = "alternate";
  auto* gen = app.add_subcommand("generate-room", "Synthesize a partitioned room and report its free space");
  gen->add_option("--length", room.length)->check(CLI::PositiveNumber);
  gen->add_option("--height", room.height)->check(CLI::PositiveNumber);
  gen->add_option("--breadth", room.breadth)->check(CLI::PositiveNumber);
  gen->add_option("--walls", room.num_walls)->check(CLI::NonNegativeNumber);
  gen->add_option("--y-ratio", room.y_wall_edge_ratio)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--z-ratio", room.z_wall_edge_ratio)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--wall-width", room.wall_width)->check(CLI::PositiveNumber);
  gen->add_option("--random-range", room.random_range)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--orient", orient, "alternate | same-side")->check(CLI::IsMember({"alternate", "same-side"}));
  gen->add_option("--voxel-size", voxel_size)->check(CLI::PositiveNumber);
  gen->add_option("--emit-obj", emit_obj, "Write the room mesh as OBJ");
  add_common(gen);

  std::string config;
  bool ply = false;
  auto* solve = app.add_subcommand("solve", "Run the sampling/optimization loop from a JSON config");
  solve->add_option("config", config)->required()->check(CLI::ExistingFile);
  solve->add_flag("--ply", ply, "Also write coverage.ply");
  add_common(solve);

  auto* bench = app.add_subcommand("benchmark", "Run strategies x scenarios x trials and tabulate");
  bench->add_option("config", config)->required()->check(CLI::ExistingFile);
  add_common(bench);

  std::size_t samples = 50;
  auto* vis = app.add_subcommand("visibility-check", "Compare flood-fill visibility to the brute-force oracle");
  vis->add_option("config", config)->required()->check(CLI::ExistingFile);
  vis->add_option("--samples", samples)->check(CLI::PositiveNumber);
  add_common(vis);

  std::uint64_t N = 10, beta = 2, n = 5;
  double p_count = 1.0, epsilon = 1.0;
  auto* theory = app.add_subcommand("theory", "Closed-form sampling probabilities and bounds (JSON)");
  theory->add_option("--N", N, "Configuration count |P x D|")->check(CLI::PositiveNumber);
  theory->add_option("--beta", beta, "Optimal network size");
  theory->add_option("--n", n, "Sample count");
  theory->add_option("--p-count", p_count, "Position count |P|")->check(CLI::NonNegativeNumber);
  theory->add_option("--epsilon", epsilon, "Direction precision quantum")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      if (common.seed) room.seed = *common.seed;
      room.wall_orient = orient == "same-side" ? WallOrient::kSameSide : WallOrient::kAlternate;
      return cmd_generate_room(room, voxel_size, emit_obj, common.out);
    }
    if (*solve) return cmd_solve(config, common, ply);
    if (*bench) return cmd_benchmark(config, common);
    if (*vis) return cmd_visibility_check(config, common, samples);
    if (*theory) return cmd_theory(N, beta, n, p_count, epsilon);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case ErrorCode::kConfig:
      case ErrorCode::kInvalidParams:
      case ErrorCode::kSceneNotFound: return kExitUsage;
      default: return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
