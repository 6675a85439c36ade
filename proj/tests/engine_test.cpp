#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "camplace/engine.hpp"

using namespace camplace;

namespace {

RunConfig small(Strategy s, std::uint64_t seed = 1) {
  RunConfig cfg;
  cfg.scenario = "small";
  RoomParams room;
  room.length = 16;
  room.height = 6;
  room.breadth = 6;
  room.num_walls = 2;
  room.wall_orient = WallOrient::kSameSide;
  cfg.room = room;
  cfg.strategy = s;
  cfg.sampling_budget = 160;
  cfg.iterations = 5;
  cfg.budget = 3;
  cfg.seed = seed;
  cfg.threads = 1;
  return cfg;
}

const Scene& small_scene() {
  static const Scene scene = build_scene(small(Strategy::kRS));
  return scene;
}

void expect_monotone(const RunReport& rep) {
  for (std::size_t k = 1; k < rep.iterations.size(); ++k) {
    EXPECT_GE(rep.iterations[k].coverage, rep.iterations[k - 1].coverage) << "iteration " << k + 1;
  }
}

ConfigBatch batch_of(std::vector<CameraConfig> cfgs) {
  ConfigBatch b;
  for (const auto& c : cfgs) b.items.push_back({c, Provenance::kRandom});
  return b;
}

}  // namespace

TEST(Run, RandomSamplingIsOneIteration) {
  auto cfg = small(Strategy::kRS);
  cfg.sampling_budget = 320;
  const auto rep = run(cfg, small_scene());
  ASSERT_EQ(rep.iterations.size(), 1u);
  EXPECT_EQ(rep.iterations[0].sampled, 320u);
  EXPECT_EQ(rep.iterations[0].sampled_cumulative, 320u);
}

TEST(Run, ExploreExploitTrajectoryIsMonotone) {
  auto cfg = small(Strategy::kEE);
  cfg.iterations = 10;
  const auto rep = run(cfg, small_scene());
  ASSERT_EQ(rep.iterations.size(), 10u);
  expect_monotone(rep);
  EXPECT_GT(rep.final_coverage(), 0u);
}

TEST(Run, AllStrategiesAndSolversAreMonotone) {
  for (auto s : {Strategy::kRS, Strategy::kEE, Strategy::kTUS}) {
    for (auto kind : {SolverKind::kExact, SolverKind::kGreedy}) {
      for (std::uint64_t seed : {1, 2, 3}) {
        auto cfg = small(s, seed);
        cfg.solver = kind;
        const auto rep = run(cfg, small_scene());
        expect_monotone(rep);
        EXPECT_LE(rep.iterations.back().sampled_cumulative, cfg.sampling_budget + cfg.iterations * cfg.dirs_per_position);
        if (kind == SolverKind::kGreedy) {
          for (const auto& it : rep.iterations) EXPECT_EQ(it.status, Optimality::kHeuristic);
        }
      }
    }
  }
}

TEST(Run, TinyTimeLimitStaysMonotone) {
  auto cfg = small(Strategy::kEE, 4);
  cfg.limits = {1e-6, std::nullopt};
  expect_monotone(run(cfg, small_scene()));
}

TEST(Run, CoverageIsTheUnionOfSelectedViews) {
  auto cfg = small(Strategy::kTUS, 5);
  const auto& scene = small_scene();
  const auto rep = run(cfg, scene);
  std::set<VoxelId> covered;
  for (const auto& c : rep.selected) {
    const auto view = calculate_camera_view(scene.mesh, scene.grid, c.config, cfg.intrinsics);
    covered.insert(view.begin(), view.end());
  }
  EXPECT_EQ(covered.size(), rep.final_coverage());
  EXPECT_EQ(rep.metrics.network_coverage, rep.final_coverage());
  EXPECT_LE(rep.selected.size(), static_cast<std::size_t>(cfg.budget));
}

TEST(Run, DeterministicAcrossThreadCounts) {
  auto cfg = small(Strategy::kEE, 9);
  const auto a = run(cfg, small_scene());
  cfg.threads = 4;
  const auto b = run(cfg, small_scene());
  ASSERT_EQ(a.iterations.size(), b.iterations.size());
  for (std::size_t k = 0; k < a.iterations.size(); ++k) {
    EXPECT_EQ(a.iterations[k].coverage, b.iterations[k].coverage);
    EXPECT_EQ(a.iterations[k].pool_size, b.iterations[k].pool_size);
    EXPECT_EQ(a.iterations[k].nodes, b.iterations[k].nodes);
  }
  EXPECT_EQ(a.solution.selected, b.solution.selected);
  ASSERT_EQ(a.selected.size(), b.selected.size());
  for (std::size_t i = 0; i < a.selected.size(); ++i) {
    EXPECT_EQ(config_key(a.selected[i].config), config_key(b.selected[i].config));
  }
}

TEST(Run, PoolGrowsWheneverSomethingNewArrives) {
  const auto rep = run(small(Strategy::kEE, 2), small_scene());
  std::size_t prev = 0;
  for (const auto& it : rep.iterations) {
    if (it.accepted > 0) {
      EXPECT_GT(it.pool_size, prev);
    }
    EXPECT_EQ(it.pool_size, prev + it.accepted);
    prev = it.pool_size;
  }
}

TEST(Run, BuildsTheSceneItself) {
  const auto rep = run(small(Strategy::kRS));
  EXPECT_EQ(rep.free_voxels, small_scene().grid.free_count());
}

TEST(Run, InvalidConfig) {
  auto cfg = small(Strategy::kEE);
  cfg.iterations = 0;
  EXPECT_THROW(run(cfg, small_scene()), Error);
  cfg = small(Strategy::kEE);
  cfg.sampling_budget = 4;
  EXPECT_THROW(run(cfg, small_scene()), Error);
  cfg = small(Strategy::kEE);
  cfg.room.reset();
  cfg.mesh_path = "/nonexistent/mesh.obj";
  try {
    run(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSceneNotFound);
  }
}

TEST(DedupeIntoPool, RejectsRepeats) {
  std::set<ConfigKey> pool;
  const CameraConfig a{3, {1, 0, 0}};
  EXPECT_EQ(dedupe_into_pool(pool, batch_of({a})).size(), 1u);
  EXPECT_TRUE(dedupe_into_pool(pool, batch_of({a})).empty());
}

TEST(DedupeIntoPool, NearbyDirectionsAreDistinct) {
  std::set<ConfigKey> pool;
  const CameraConfig a{3, {1, 0, 0}};
  const CameraConfig b{3, normalized(Vec3{1, 1e-3, 0})};
  EXPECT_EQ(dedupe_into_pool(pool, batch_of({a, b})).size(), 2u);
}

TEST(DedupeIntoPool, EmptyPoolAcceptsBatchInOrder) {
  std::set<ConfigKey> pool;
  const std::vector<CameraConfig> cfgs{{5, {0, 0, 1}}, {1, {1, 0, 0}}, {9, {0, 0, -1}}};
  const auto accepted = dedupe_into_pool(pool, batch_of(cfgs));
  ASSERT_EQ(accepted.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(accepted[i].config.position, cfgs[i].position);
}

TEST(Benchmark, RandomOnlyHasNoImprovement) {
  auto cfg = small(Strategy::kRS);
  const auto res = benchmark({cfg}, 5);
  ASSERT_EQ(res.runs.size(), 5u);
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_EQ(res.rows[0].runs, 5u);
  EXPECT_FALSE(res.rows[0].improvement_pct);
  EXPECT_FALSE(res.rows[0].overtake_fraction);
  for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(res.runs[t].seed, cfg.seed + t);
  EXPECT_LE(res.rows[0].min, res.rows[0].mean);
  EXPECT_LE(res.rows[0].mean, res.rows[0].max);
}

TEST(Benchmark, AggregatesAreReproducible) {
  const std::vector<RunConfig> cfgs{small(Strategy::kRS), small(Strategy::kEE)};
  const auto a = benchmark(cfgs, 2), b = benchmark(cfgs, 2);
  ASSERT_EQ(a.rows.size(), 2u);
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_EQ(a.rows[r].mean, b.rows[r].mean);
    EXPECT_EQ(a.rows[r].improvement_pct, b.rows[r].improvement_pct);
    EXPECT_EQ(a.rows[r].overtake_fraction, b.rows[r].overtake_fraction);
  }
  ASSERT_TRUE(a.rows[1].improvement_pct);
  const double expected = 100.0 * (a.rows[1].mean - a.rows[0].mean) / a.rows[0].mean;
  EXPECT_NEAR(*a.rows[1].improvement_pct, expected, 1e-9);
  ASSERT_EQ(a.rows[1].trajectory.size(), 5u);
  EXPECT_DOUBLE_EQ(a.rows[1].trajectory.back().budget_fraction, 1.0);
  if (a.rows[1].overtake_fraction) {
    const auto it = std::find_if(a.rows[1].trajectory.begin(), a.rows[1].trajectory.end(),
                                 [&](const TrajectoryPoint& p) { return p.mean > a.rows[0].mean; });
    EXPECT_EQ(it->budget_fraction, *a.rows[1].overtake_fraction);
  }
}

TEST(Benchmark, RejectsZeroTrials) { EXPECT_THROW(benchmark({small(Strategy::kRS)}, 0), Error); }
