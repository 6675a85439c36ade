#pragma once

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "camplace/engine.hpp"
#include "camplace/error.hpp"
#include "camplace/solver.hpp"
#include "camplace/voxel_grid.hpp"

namespace camplace {

using Json = nlohmann::json;

namespace detail {

inline Json vec_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace detail

// ---- grid ----------------------------------------------------------------

/// Occupancy as runs of "<count><F|C>" in linear cell order (x fastest).
inline std::string encode_occupancy(const std::vector<std::uint8_t>& closed) {
  std::string out;
  for (std::size_t i = 0; i < closed.size();) {
    std::size_t j = i;
    while (j < closed.size() && closed[j] == closed[i]) ++j;
    out += std::to_string(j - i);
    out += closed[i] ? 'C' : 'F';
    i = j;
  }
  return out;
}

inline std::vector<std::uint8_t> decode_occupancy(const std::string& rle) {
  std::vector<std::uint8_t> out;
  std::size_t count = 0;
  bool have_digits = false;
  for (char ch : rle) {
    if (ch >= '0' && ch <= '9') {
      count = count * 10 + static_cast<std::size_t>(ch - '0');
      have_digits = true;
    } else if ((ch == 'F' || ch == 'C') && have_digits) {
      out.insert(out.end(), count, ch == 'C' ? 1 : 0);
      count = 0;
      have_digits = false;
    } else {
      throw Error(ErrorCode::kParse, "bad occupancy run-length string");
    }
  }
  if (have_digits) throw Error(ErrorCode::kParse, "occupancy string ends mid-run");
  return out;
}

inline Json grid_to_json(const VoxelGrid& g) {
  return Json{{"origin", detail::vec_json(g.origin())},
              {"dims", Json::array({g.dims()[0], g.dims()[1], g.dims()[2]})},
              {"voxel_size", g.voxel_size()},
              {"free_count", g.free_count()},
              {"occupancy", encode_occupancy(g.occupancy())}};
}

inline VoxelGrid grid_from_json(const Json& j) {
  try {
    const auto& o = j.at("origin");
    const auto& d = j.at("dims");
    VoxelGrid g({o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>()},
                j.at("voxel_size").get<double>(), {d.at(0).get<int>(), d.at(1).get<int>(), d.at(2).get<int>()},
                decode_occupancy(j.at("occupancy").get<std::string>()));
    if (j.contains("free_count") && j["free_count"].get<std::size_t>() != g.free_count()) {
      throw Error(ErrorCode::kParse, "free_count does not match occupancy");
    }
    return g;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("grid json: ") + e.what());
  }
}

// ---- instance ------------------------------------------------------------

inline Json instance_to_json(const CoverageInstance& inst) {
  Json cands = Json::array();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const Cell& c = inst.cells[i];
    cands.push_back({{"cost", inst.costs[i]}, {"cell", Json::array({c.i, c.j, c.k})}, {"voxels", inst.sets[i]}});
  }
  return Json{{"universe", inst.universe},
              {"budget", inst.budget},
              {"locale_radius", inst.locale_radius},
              {"candidates", cands}};
}

inline CoverageInstance instance_from_json(const Json& j) {
  try {
    CoverageInstance inst;
    inst.universe = j.at("universe").get<std::size_t>();
    inst.budget = j.at("budget").get<double>();
    inst.locale_radius = j.value("locale_radius", 0);
    for (const auto& c : j.at("candidates")) {
      inst.costs.push_back(c.value("cost", 1.0));
      const auto& cell = c.at("cell");
      inst.cells.push_back({cell.at(0).get<int>(), cell.at(1).get<int>(), cell.at(2).get<int>()});
      inst.sets.push_back(c.at("voxels").get<VoxelSet>());
    }
    inst.validate();
    return inst;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("instance json: ") + e.what());
  }
}

// ---- run outputs ---------------------------------------------------------

/// Everything in a run that is determined by config and seed; wall times
/// are kept out so reruns compare byte for byte (see timings_to_json).
inline Json report_to_json(const RunReport& r) {
  Json iters = Json::array();
  for (const auto& it : r.iterations) {
    iters.push_back({{"iteration", it.iteration},
                     {"sampled", it.sampled},
                     {"sampled_cumulative", it.sampled_cumulative},
                     {"accepted", it.accepted},
                     {"pool_size", it.pool_size},
                     {"coverage", it.coverage},
                     {"selected", it.selected},
                     {"status", to_string(it.status)},
                     {"nodes", it.nodes},
                     {"fallback_random", it.fallback_random}});
  }
  Json cams = Json::array();
  for (std::size_t i = 0; i < r.selected.size(); ++i) {
    const auto& c = r.selected[i];
    const auto& m = r.metrics.cameras[i];
    cams.push_back({{"candidate", r.solution.selected[i]},
                    {"position", c.config.position},
                    {"direction", detail::vec_json(c.config.direction)},
                    {"provenance", to_string(c.provenance)},
                    {"covered", m.covered},
                    {"share", m.share},
                    {"overcovered", m.overcovered}});
  }
  Json prov = Json::object();
  for (const auto& [p, n] : r.pool_provenance) prov[to_string(p)] = n;
  return Json{{"scenario", r.scenario},
              {"strategy", to_string(r.strategy)},
              {"solver", to_string(r.solver)},
              {"seed", r.seed},
              {"free_voxels", r.free_voxels},
              {"positions", r.positions},
              {"sampling_budget", r.sampling_budget},
              {"budget", r.budget},
              {"coverage", r.final_coverage()},
              {"coverage_fraction", r.coverage_fraction()},
              {"status", to_string(r.solution.status)},
              {"covered_more_than_once", r.metrics.covered_more_than_once},
              {"iterations", iters},
              {"cameras", cams},
              {"pool_provenance", prov}};
}

inline Json timings_to_json(const RunReport& r) {
  Json iters = Json::array();
  for (const auto& it : r.iterations) {
    iters.push_back({{"iteration", it.iteration},
                     {"sample_seconds", it.sample_seconds},
                     {"visibility_seconds", it.visibility_seconds},
                     {"solve_seconds", it.solve_seconds}});
  }
  return Json{{"scene_seconds", r.scene_seconds},
              {"preprocessing_seconds", r.preprocessing_seconds()},
              {"solve_seconds", r.solve_seconds()},
              {"iterations", iters}};
}

inline void write_trajectory_csv(std::ostream& out, const RunReport& r) {
  out << "iteration,sampled,sampled_cumulative,accepted,pool_size,coverage,coverage_pct,selected,status\n";
  for (const auto& it : r.iterations) {
    out << it.iteration << ',' << it.sampled << ',' << it.sampled_cumulative << ',' << it.accepted << ','
        << it.pool_size << ',' << it.coverage << ','
        << detail::fmt("%.4f", r.free_voxels ? 100.0 * it.coverage / r.free_voxels : 0.0) << ',' << it.selected
        << ',' << to_string(it.status) << '\n';
  }
}

/// One row per run, then one aggregate row per (scenario, strategy).
/// Baseline rows carry "-" in the improvement column.
inline void write_benchmark_csv(std::ostream& out, const BenchmarkResult& b) {
  out << "kind,scenario,strategy,seed,free_voxels,coverage,coverage_pct,min_pct,max_pct,mean_pct,"
         "improvement_pct,overtake_fraction\n";
  for (const auto& r : b.runs) {
    out << "run," << r.scenario << ',' << to_string(r.strategy) << ',' << r.seed << ',' << r.free_voxels << ','
        << r.final_coverage() << ',' << detail::fmt("%.4f", 100.0 * r.coverage_fraction()) << ",,,,,\n";
  }
  for (const auto& row : b.rows) {
    out << "aggregate," << row.scenario << ',' << to_string(row.strategy) << ",," << row.free_voxels << ",,,"
        << detail::fmt("%.4f", row.min) << ',' << detail::fmt("%.4f", row.max) << ','
        << detail::fmt("%.4f", row.mean) << ','
        << (row.improvement_pct ? detail::fmt("%.4f", *row.improvement_pct) : std::string("-")) << ','
        << (row.overtake_fraction ? detail::fmt("%.4f", *row.overtake_fraction) : std::string("-")) << '\n';
  }
}

inline void write_benchmark_timings_csv(std::ostream& out, const BenchmarkResult& b) {
  out << "scenario,strategy,runs,mean_preprocessing_seconds,mean_solve_seconds\n";
  for (const auto& row : b.rows) {
    out << row.scenario << ',' << to_string(row.strategy) << ',' << row.runs << ','
        << detail::fmt("%.6f", row.mean_preprocessing_seconds) << ','
        << detail::fmt("%.6f", row.mean_solve_seconds) << '\n';
  }
}

inline void write_benchmark_trajectory_csv(std::ostream& out, const BenchmarkResult& b) {
  out << "scenario,strategy,iteration,budget_fraction,mean_pct,min_pct,max_pct\n";
  for (const auto& row : b.rows) {
    for (const auto& tp : row.trajectory) {
      out << row.scenario << ',' << to_string(row.strategy) << ',' << tp.iteration << ','
          << detail::fmt("%.4f", tp.budget_fraction) << ',' << detail::fmt("%.4f", tp.mean) << ','
          << detail::fmt("%.4f", tp.min) << ',' << detail::fmt("%.4f", tp.max) << '\n';
    }
  }
}

/// ASCII PLY point cloud: every free voxel center (state 0 uncovered,
/// 1 covered), and per camera its center plus a point one voxel along the
/// view direction (state 2), joined by an edge.
inline void write_ply(std::ostream& out, const VoxelGrid& grid, const VoxelSet& covered,
                      const std::vector<CameraConfig>& cameras) {
  const std::size_t n = grid.free_count() + 2 * cameras.size();
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << n << "\nproperty float x\nproperty float y\nproperty float z\nproperty int state\n"
      << "element edge " << cameras.size() << "\nproperty int vertex1\nproperty int vertex2\nend_header\n";
  auto point = [&](const Vec3& p, int state) {
    out << detail::fmt("%g", p.x) << ' ' << detail::fmt("%g", p.y) << ' ' << detail::fmt("%g", p.z) << ' '
        << state << '\n';
  };
  std::vector<std::uint8_t> is_covered(grid.free_count(), 0);
  for (auto v : covered) is_covered[v] = 1;
  for (VoxelId v = 0; v < grid.free_count(); ++v) point(grid.free_center(v), is_covered[v]);
  for (const auto& c : cameras) {
    const Vec3 p = grid.free_center(c.position);
    point(p, 2);
    point(p + c.direction * grid.voxel_size(), 2);
  }
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    const std::size_t a = grid.free_count() + 2 * i;
    out << a << ' ' << a + 1 << '\n';
  }
}

// ---- config --------------------------------------------------------------

namespace detail {

inline void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorCode::kConfig, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_fraction(const Json& j, const char* key, double& out) {
  read(j, key, out);
  if (j.contains(key) && !(out >= 0.0 && out <= 1.0)) {
    throw Error(ErrorCode::kConfig, std::string(key) + " must lie in [0, 1]");
  }
}

inline WallOrient parse_orient(const Json& j) {
  if (j.is_number_integer()) {
    const int t = j.get<int>();
    if (t == 1) return WallOrient::kAlternate;
    if (t == 2) return WallOrient::kSameSide;
  } else if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "alternate") return WallOrient::kAlternate;
    if (s == "same-side") return WallOrient::kSameSide;
  }
  throw Error(ErrorCode::kConfig, "wall_orient must be \"alternate\" (1) or \"same-side\" (2)");
}

inline RoomParams parse_room(const Json& j) {
  check_keys(j,
             {"length", "height", "breadth", "num_walls", "y_wall_edge_ratio", "z_wall_edge_ratio", "wall_width",
              "random_range", "seed", "wall_orient"},
             "scene.room");
  RoomParams p;
  read(j, "length", p.length);
  read(j, "height", p.height);
  read(j, "breadth", p.breadth);
  read(j, "num_walls", p.num_walls);
  read_fraction(j, "y_wall_edge_ratio", p.y_wall_edge_ratio);
  read_fraction(j, "z_wall_edge_ratio", p.z_wall_edge_ratio);
  read(j, "wall_width", p.wall_width);
  read_fraction(j, "random_range", p.random_range);
  read(j, "seed", p.seed);
  if (j.contains("wall_orient")) p.wall_orient = parse_orient(j["wall_orient"]);
  return p;
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "RS") return Strategy::kRS;
  if (s == "EE") return Strategy::kEE;
  if (s == "TUS") return Strategy::kTUS;
  throw Error(ErrorCode::kConfig, "strategy must be RS, EE or TUS");
}

}  // namespace detail

inline const std::initializer_list<const char*>& run_config_keys() {
  static const std::initializer_list<const char*> keys{
      "scenario", "scene",      "voxel_size", "y_band", "camera",        "strategy", "ee",
      "tus",      "sampling_budget", "iterations", "dirs_per_position", "budget",   "camera_cost",
      "locale_radius", "solver", "seed", "trials", "threads", "output"};
  return keys;
}

/// Applies the keys of `j` on top of `cfg`. Unknown keys are errors.
inline void apply_run_config(const Json& j, RunConfig& cfg) {
  using detail::read;
  try {
    detail::check_keys(j, run_config_keys(), "config");
    read(j, "scenario", cfg.scenario);
    if (j.contains("scene")) {
      const Json& s = j["scene"];
      detail::check_keys(s, {"room", "mesh", "interior_seed"}, "scene");
      if (s.contains("room") == s.contains("mesh")) {
        throw Error(ErrorCode::kConfig, "scene needs exactly one of 'room' and 'mesh'");
      }
      if (s.contains("room")) {
        cfg.room = detail::parse_room(s["room"]);
        cfg.mesh_path.clear();
      } else {
        cfg.room.reset();
        cfg.mesh_path = s["mesh"].get<std::string>();
      }
      if (s.contains("interior_seed")) {
        const auto v = s["interior_seed"].get<std::vector<double>>();
        if (v.size() != 3) throw Error(ErrorCode::kConfig, "interior_seed needs 3 components");
        cfg.interior_seed = Vec3{v[0], v[1], v[2]};
      }
    }
    read(j, "voxel_size", cfg.voxel_size);
    if (j.contains("y_band")) {
      if (j["y_band"].is_null()) {
        cfg.y_band.reset();
      } else {
        const auto v = j["y_band"].get<std::vector<double>>();
        if (v.size() != 2) throw Error(ErrorCode::kConfig, "y_band needs [low, high]");
        cfg.y_band = std::pair{v[0], v[1]};
      }
    }
    if (j.contains("camera")) {
      const Json& c = j["camera"];
      detail::check_keys(c, {"hfov_deg", "vfov_deg", "dof_min", "dof_max"}, "camera");
      if (c.contains("hfov_deg")) cfg.intrinsics.hfov = deg_to_rad(c["hfov_deg"].get<double>());
      if (c.contains("vfov_deg")) cfg.intrinsics.vfov = deg_to_rad(c["vfov_deg"].get<double>());
      read(c, "dof_min", cfg.intrinsics.dof_min);
      if (c.contains("dof_max")) {
        cfg.intrinsics.dof_max =
            c["dof_max"].is_null() ? std::numeric_limits<double>::infinity() : c["dof_max"].get<double>();
      }
    }
    if (j.contains("strategy")) cfg.strategy = detail::parse_strategy(j["strategy"].get<std::string>());
    if (j.contains("ee")) {
      const Json& e = j["ee"];
      detail::check_keys(e, {"f_exploit", "theta_jitter_deg", "v_jitter"}, "ee");
      detail::read_fraction(e, "f_exploit", cfg.ee.f_exploit);
      if (e.contains("theta_jitter_deg")) cfg.ee.theta_jitter = deg_to_rad(e["theta_jitter_deg"].get<double>());
      read(e, "v_jitter", cfg.ee.v_jitter);
    }
    if (j.contains("tus")) {
      const Json& t = j["tus"];
      detail::check_keys(t, {"f_unc", "super_size", "strict_vis_req"}, "tus");
      detail::read_fraction(t, "f_unc", cfg.tus.f_unc);
      read(t, "super_size", cfg.tus.super_size);
      read(t, "strict_vis_req", cfg.tus.strict_vis_req);
    }
    read(j, "sampling_budget", cfg.sampling_budget);
    read(j, "iterations", cfg.iterations);
    read(j, "dirs_per_position", cfg.dirs_per_position);
    read(j, "budget", cfg.budget);
    read(j, "camera_cost", cfg.camera_cost);
    read(j, "locale_radius", cfg.locale_radius);
    if (j.contains("solver")) {
      const Json& s = j["solver"];
      detail::check_keys(s, {"kind", "node_limit", "time_limit_ms"}, "solver");
      if (s.contains("kind")) {
        const auto k = s["kind"].get<std::string>();
        if (k == "exact") {
          cfg.solver = SolverKind::kExact;
        } else if (k == "greedy") {
          cfg.solver = SolverKind::kGreedy;
        } else {
          throw Error(ErrorCode::kConfig, "solver.kind must be exact or greedy");
        }
      }
      if (s.contains("node_limit")) {
        cfg.limits.node_limit = s["node_limit"].is_null() ? std::nullopt
                                                          : std::optional(s["node_limit"].get<std::uint64_t>());
      }
      if (s.contains("time_limit_ms")) {
        cfg.limits.time_limit_seconds = s["time_limit_ms"].is_null()
                                            ? std::nullopt
                                            : std::optional(s["time_limit_ms"].get<double>() / 1000.0);
      }
    }
    read(j, "seed", cfg.seed);
    read(j, "trials", cfg.trials);
    read(j, "threads", cfg.threads);
    if (j.contains("output")) detail::check_keys(j["output"], {"dir", "ply"}, "output");
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
}

inline RunConfig parse_run_config(const Json& j) {
  RunConfig cfg;
  apply_run_config(j, cfg);
  return cfg;
}

/// Benchmark file: {"base": {...run config...}, "scenarios": [{...overrides,
/// "scenario" names it...}], "strategies": ["RS", "EE"], "trials": 5}.
struct BenchmarkConfig {
  std::vector<RunConfig> runs;
  std::size_t trials = 5;
};

inline BenchmarkConfig parse_benchmark_config(const Json& j) {
  try {
    detail::check_keys(j, {"base", "scenarios", "strategies", "trials", "output"}, "benchmark config");
    BenchmarkConfig out;
    detail::read(j, "trials", out.trials);
    if (out.trials < 1) throw Error(ErrorCode::kConfig, "trials must be >= 1");
    const Json base = j.value("base", Json::object());
    const Json scenarios = j.value("scenarios", Json::array({Json::object()}));
    const auto strategies = j.value("strategies", std::vector<std::string>{"RS", "EE"});
    if (scenarios.empty() || strategies.empty()) throw Error(ErrorCode::kConfig, "nothing to benchmark");
    std::set<std::string> names;
    for (const auto& sc : scenarios) {
      Json merged = base;
      merged.merge_patch(sc);
      for (const auto& s : strategies) {
        merged["strategy"] = s;
        out.runs.push_back(parse_run_config(merged));
      }
      if (!names.insert(out.runs.back().scenario).second) {
        throw Error(ErrorCode::kConfig, "duplicate scenario name '" + out.runs.back().scenario + "'");
      }
    }
    return out;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
}

}  // namespace camplace
