#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "camplace/error.hpp"
#include "camplace/mesh.hpp"
#include "camplace/rng.hpp"
#include "camplace/room.hpp"
#include "camplace/sampling.hpp"
#include "camplace/solver.hpp"
#include "camplace/supervoxel.hpp"
#include "camplace/visibility.hpp"
#include "camplace/voxel_grid.hpp"

namespace camplace {

enum class Strategy { kRS, kEE, kTUS };
enum class SolverKind { kExact, kGreedy };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kRS: return "RS";
    case Strategy::kEE: return "EE";
    case Strategy::kTUS: return "TUS";
  }
  return "?";
}

inline const char* to_string(SolverKind s) { return s == SolverKind::kExact ? "exact" : "greedy"; }

struct RunConfig {
  std::string scenario = "room";
  // scene source: a generated room, or an OBJ file when `room` is empty
  std::optional<RoomParams> room = RoomParams{};
  std::string mesh_path;
  std::optional<Vec3> interior_seed;
  double voxel_size = 1.0;
  std::optional<std::pair<double, double>> y_band;

  CameraIntrinsics intrinsics;
  Strategy strategy = Strategy::kEE;
  EEParams ee;
  TUSParams tus;
  std::size_t sampling_budget = 800;
  std::size_t iterations = 10;
  std::size_t dirs_per_position = 8;

  double budget = 4.0;
  double camera_cost = 1.0;
  int locale_radius = 0;
  SolverKind solver = SolverKind::kExact;
  SolveLimits limits{std::nullopt, std::uint64_t{20000}};

  std::uint64_t seed = 0;
  std::size_t trials = 5;
  unsigned threads = 0;

  std::size_t effective_iterations() const { return strategy == Strategy::kRS ? 1 : iterations; }

  // Positions drawn per iteration; each gets dirs_per_position directions.
  std::size_t positions_per_iteration() const {
    return round_count(static_cast<double>(sampling_budget) / static_cast<double>(effective_iterations()) /
                       static_cast<double>(dirs_per_position));
  }

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidParams, what); };
    if (!room && mesh_path.empty()) fail("no scene source");
    if (!(voxel_size > 0.0)) fail("voxel_size must be > 0");
    if (iterations < 1) fail("iterations must be >= 1");
    if (dirs_per_position < 1) fail("dirs_per_position must be >= 1");
    if (sampling_budget < 1) fail("sampling_budget must be >= 1");
    if (positions_per_iteration() < 1) fail("sampling budget too small for the iteration count");
    if (!(budget >= 0.0)) fail("budget must be >= 0");
    if (!(camera_cost > 0.0)) fail("camera_cost must be > 0");
    if (locale_radius < 0) fail("locale_radius must be >= 0");
    if (trials < 1) fail("trials must be >= 1");
    if (y_band && y_band->first > y_band->second) fail("y_band must be ordered");
    intrinsics.validate();
    ee.validate();
    tus.validate();
  }
};

struct Scene {
  TriangleMesh mesh;
  VoxelGrid grid;
  std::vector<VoxelId> positions;
};

inline Scene build_scene(const RunConfig& cfg) {
  Scene s;
  s.mesh = cfg.room ? generate_room(*cfg.room) : load_mesh(cfg.mesh_path);
  s.grid = voxelize(s.mesh, cfg.voxel_size, cfg.interior_seed);
  s.positions = camera_positions(s.grid, cfg.y_band);
  if (s.positions.empty()) throw Error(ErrorCode::kEmptyFreeSpace, "no free voxel inside the height band");
  return s;
}

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t sampled = 0;             // batch size before pool dedupe
  std::size_t sampled_cumulative = 0;
  std::size_t accepted = 0;
  std::size_t pool_size = 0;
  std::size_t coverage = 0;
  std::size_t selected = 0;
  Optimality status = Optimality::kProven;
  std::uint64_t nodes = 0;
  bool fallback_random = false;
  double sample_seconds = 0.0;
  double visibility_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct RunReport {
  std::string scenario;
  Strategy strategy = Strategy::kEE;
  SolverKind solver = SolverKind::kExact;
  std::uint64_t seed = 0;
  std::size_t free_voxels = 0;
  std::size_t positions = 0;
  std::size_t sampling_budget = 0;
  double budget = 0.0;
  std::vector<IterationRecord> iterations;
  Solution solution;
  std::vector<Candidate> selected;
  CoverageReport metrics;
  std::map<Provenance, std::size_t> pool_provenance;
  double scene_seconds = 0.0;

  std::size_t final_coverage() const { return iterations.empty() ? 0 : iterations.back().coverage; }
  double coverage_fraction() const {
    return free_voxels ? static_cast<double>(final_coverage()) / static_cast<double>(free_voxels) : 0.0;
  }
  double preprocessing_seconds() const {
    double s = scene_seconds;
    for (const auto& it : iterations) s += it.sample_seconds + it.visibility_seconds;
    return s;
  }
  double solve_seconds() const {
    double s = 0.0;
    for (const auto& it : iterations) s += it.solve_seconds;
    return s;
  }
};

/// Batch entries whose (voxel, quantized direction) key is new to the pool,
/// in batch order. Accepted keys are added to `pool_keys`.
inline std::vector<Candidate> dedupe_into_pool(std::set<ConfigKey>& pool_keys, const ConfigBatch& batch) {
  std::vector<Candidate> accepted;
  for (const auto& c : batch.items) {
    if (pool_keys.insert(config_key(c.config)).second) accepted.push_back(c);
  }
  return accepted;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline VoxelSet uncovered_voxels(std::size_t universe, const VoxelSet& covered) {
  VoxelSet out;
  out.reserve(universe - covered.size());
  auto it = covered.begin();
  for (VoxelId v = 0; v < universe; ++v) {
    if (it != covered.end() && *it == v) {
      ++it;
    } else {
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace detail

/// The sample / evaluate / solve loop on a prebuilt scene.
///
/// Each iteration draws a strategy batch from its own sub-seed, keeps the
/// configurations that are new to the pool, evaluates visibility for those
/// only, and re-solves the grown instance warm-started from the previous
/// network, so coverage never decreases.
inline RunReport run(const RunConfig& cfg, const Scene& scene) {
  cfg.validate();
  const VoxelGrid& grid = scene.grid;
  RunReport rep;
  rep.scenario = cfg.scenario;
  rep.strategy = cfg.strategy;
  rep.solver = cfg.solver;
  rep.seed = cfg.seed;
  rep.free_voxels = grid.free_count();
  rep.positions = scene.positions.size();
  rep.sampling_budget = cfg.sampling_budget;
  rep.budget = cfg.budget;

  EEParams ee = cfg.ee;
  TUSParams tus = cfg.tus;
  ee.n_pos = tus.n_pos = cfg.positions_per_iteration();
  ee.n_dir_pos = tus.n_dir_pos = cfg.dirs_per_position;

  CoverageInstance inst;
  inst.universe = grid.free_count();
  inst.budget = cfg.budget;
  inst.locale_radius = cfg.locale_radius;
  std::vector<Candidate> pool;
  std::set<ConfigKey> pool_keys;
  Solution current;
  current.status = Optimality::kProven;
  std::size_t cumulative = 0;

  for (std::size_t k = 0; k < cfg.effective_iterations(); ++k) {
    IterationRecord rec;
    rec.iteration = k + 1;
    Rng rng(derive_seed(cfg.seed, k, "sample"));

    auto t0 = std::chrono::steady_clock::now();
    ConfigBatch batch;
    switch (cfg.strategy) {
      case Strategy::kRS:
        batch = sample_random_configurations(ee.n_pos, scene.positions, ee.n_dir_pos, rng);
        dedupe_batch(batch);
        break;
      case Strategy::kEE: {
        std::vector<CameraConfig> prev;
        for (auto c : current.selected) prev.push_back(pool[c].config);
        batch = explore_and_exploit(ee, grid, scene.positions, prev, rng);
        break;
      }
      case Strategy::kTUS: {
        const VoxelSet uncovered = detail::uncovered_voxels(grid.free_count(), current.covered);
        const SupervoxelGrid sg = supervoxel_counts(grid, uncovered, tus.super_size);
        batch = target_uncovered_spaces(tus, grid, scene.mesh, scene.positions, sg, rng);
        break;
      }
    }
    rec.fallback_random = batch.fallback_random;
    rec.sampled = batch.size();
    cumulative += batch.size();
    rec.sampled_cumulative = cumulative;
    const std::vector<Candidate> accepted = dedupe_into_pool(pool_keys, batch);
    rec.accepted = accepted.size();
    rec.sample_seconds = detail::seconds_since(t0);

    if (accepted.empty()) {
      std::fprintf(stderr, "warning: iteration %zu produced no new configurations\n", k + 1);
    } else {
      t0 = std::chrono::steady_clock::now();
      std::vector<CameraConfig> configs;
      configs.reserve(accepted.size());
      for (const auto& c : accepted) configs.push_back(c.config);
      std::vector<VoxelSet> views = compute_views(scene.mesh, grid, configs, cfg.intrinsics, cfg.threads);
      rec.visibility_seconds = detail::seconds_since(t0);
      for (std::size_t i = 0; i < accepted.size(); ++i) {
        pool.push_back(accepted[i]);
        inst.sets.push_back(std::move(views[i]));
        inst.costs.push_back(cfg.camera_cost);
        inst.cells.push_back(grid.free_cell(accepted[i].config.position));
      }

      t0 = std::chrono::steady_clock::now();
      const bool warm = k > 0;
      if (cfg.solver == SolverKind::kExact) {
        current = solve_exact(inst, warm ? &current : nullptr, cfg.limits);
      } else {
        // greedy has no warm start of its own; keep the previous network
        // when the fresh greedy pick is worse
        Solution g = solve_greedy(inst);
        if (!warm || g.objective >= current.objective) current = std::move(g);
      }
      rec.solve_seconds = detail::seconds_since(t0);
    }

    if (union_of(inst, current.selected).size() != current.objective) {
      throw std::logic_error("solver coverage disagrees with the union of visibility sets");
    }
    rec.pool_size = pool.size();
    rec.coverage = current.objective;
    rec.selected = current.selected.size();
    rec.status = current.status;
    rec.nodes = current.nodes;
    rep.iterations.push_back(rec);
  }

  rep.solution = current;
  for (auto c : current.selected) rep.selected.push_back(pool[c]);
  rep.metrics = coverage_metrics(current, inst);
  for (const auto& c : pool) ++rep.pool_provenance[c.provenance];
  return rep;
}

inline RunReport run(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Scene scene = build_scene(cfg);
  const double scene_seconds = detail::seconds_since(t0);
  RunReport rep = run(cfg, scene);
  rep.scene_seconds = scene_seconds;
  return rep;
}

struct TrajectoryPoint {
  std::size_t iteration = 0;
  double budget_fraction = 0.0;  // planned share of the sampling budget spent
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct BenchmarkRow {
  std::string scenario;
  Strategy strategy = Strategy::kRS;
  std::size_t runs = 0;
  std::size_t free_voxels = 0;
  // coverage as a percentage of free voxels
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double mean_preprocessing_seconds = 0.0;
  double mean_solve_seconds = 0.0;
  std::optional<double> improvement_pct;  // vs RS on the same scenario; empty for RS itself
  std::optional<double> overtake_fraction;  // budget share where the mean first beats RS's final mean
  std::vector<TrajectoryPoint> trajectory;
};

struct BenchmarkResult {
  std::vector<RunReport> runs;
  std::vector<BenchmarkRow> rows;
};

/// Runs every configuration for `trials` seeds (config seed + trial index)
/// and aggregates per (scenario, strategy).
inline BenchmarkResult benchmark(const std::vector<RunConfig>& configs, std::size_t trials) {
  if (trials < 1) throw Error(ErrorCode::kInvalidParams, "trials must be >= 1");
  BenchmarkResult out;
  std::map<std::string, Scene> scenes;
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // [first, last) run index per config
  for (const auto& base : configs) {
    base.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto it = scenes.find(base.scenario);
    if (it == scenes.end()) it = scenes.emplace(base.scenario, build_scene(base)).first;
    const double scene_seconds = detail::seconds_since(t0);
    const std::size_t first = out.runs.size();
    for (std::size_t t = 0; t < trials; ++t) {
      RunConfig cfg = base;
      cfg.seed = base.seed + t;
      out.runs.push_back(run(cfg, it->second));
      out.runs.back().scene_seconds = t == 0 ? scene_seconds : 0.0;
    }
    groups.emplace_back(first, out.runs.size());
  }

  for (std::size_t g = 0; g < configs.size(); ++g) {
    const auto [first, last] = groups[g];
    BenchmarkRow row;
    row.scenario = configs[g].scenario;
    row.strategy = configs[g].strategy;
    row.runs = last - first;
    row.free_voxels = out.runs[first].free_voxels;
    row.min = 100.0;
    const std::size_t n_iter = out.runs[first].iterations.size();
    row.trajectory.resize(n_iter);
    for (std::size_t r = first; r < last; ++r) {
      const RunReport& rep = out.runs[r];
      const double pct = 100.0 * rep.coverage_fraction();
      row.min = std::min(row.min, pct);
      row.max = std::max(row.max, pct);
      row.mean += pct / row.runs;
      row.mean_preprocessing_seconds += rep.preprocessing_seconds() / row.runs;
      row.mean_solve_seconds += rep.solve_seconds() / row.runs;
      for (std::size_t k = 0; k < n_iter; ++k) {
        const double p = 100.0 * rep.iterations[k].coverage / rep.free_voxels;
        auto& tp = row.trajectory[k];
        if (r == first) tp.min = tp.max = p;
        tp.min = std::min(tp.min, p);
        tp.max = std::max(tp.max, p);
        tp.mean += p / row.runs;
      }
    }
    for (std::size_t k = 0; k < n_iter; ++k) {
      row.trajectory[k].iteration = k + 1;
      row.trajectory[k].budget_fraction = static_cast<double>(k + 1) / static_cast<double>(n_iter);
    }
    out.rows.push_back(std::move(row));
  }

  for (auto& row : out.rows) {
    if (row.strategy == Strategy::kRS) continue;
    auto base = std::find_if(out.rows.begin(), out.rows.end(), [&](const BenchmarkRow& r) {
      return r.scenario == row.scenario && r.strategy == Strategy::kRS;
    });
    if (base == out.rows.end()) continue;
    if (base->mean > 0.0) row.improvement_pct = 100.0 * (row.mean - base->mean) / base->mean;
    for (const auto& tp : row.trajectory) {
      if (tp.mean > base->mean) {
        row.overtake_fraction = tp.budget_fraction;
        break;
      }
    }
  }
  return out;
}

}  // namespace camplace
