#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "camplace/room.hpp"
#include "camplace/sampling.hpp"
#include "camplace/visibility.hpp"
#include "camplace/voxel_grid.hpp"

using namespace camplace;

namespace {

struct World {
  TriangleMesh mesh;
  VoxelGrid grid;
};

World make_room(int l, int h, int b, int walls, WallOrient orient = WallOrient::kAlternate) {
  RoomParams p;
  p.length = l;
  p.height = h;
  p.breadth = b;
  p.num_walls = walls;
  p.wall_orient = orient;
  World w{generate_room(p), {}};
  w.grid = voxelize(w.mesh, 1.0);
  return w;
}

VoxelId at(const VoxelGrid& g, int i, int j, int k) { return *g.free_id({i, j, k}); }

bool subset(const VoxelSet& a, const VoxelSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

}  // namespace

TEST(CameraView, EmptyRoomMatchesOracle) {
  const auto w = make_room(10, 5, 5, 0);
  const CameraConfig cfg{at(w.grid, 5, 2, 2), {1, 0, 0}};
  const CameraIntrinsics intr;
  const auto fill = calculate_camera_view(w.mesh, w.grid, cfg, intr);
  EXPECT_FALSE(fill.empty());
  EXPECT_EQ(fill, brute_force_view(w.mesh, w.grid, cfg, intr));
}

TEST(CameraView, FacingAWallMatchesOracle) {
  // 5x3x3 room with a slab filling x in [3, 4) except one corridor row
  std::vector<Triangle> tris;
  add_box(tris, {0, 0, 0}, {5, 3, 3});
  add_box(tris, {3, 0, 0}, {4, 3, 2});
  const auto mesh = validated(tris);
  const auto grid = voxelize(mesh, 1.0);
  const CameraConfig cfg{at(grid, 2, 1, 0), {1, 0, 0}};
  const CameraIntrinsics intr;
  const auto fill = calculate_camera_view(mesh, grid, cfg, intr);
  const auto oracle = brute_force_view(mesh, grid, cfg, intr);
  EXPECT_TRUE(subset(fill, oracle));
  EXPECT_EQ(fill, oracle);
}

TEST(CameraView, TinyDepthOfFieldSeesNothing) {
  const auto w = make_room(10, 5, 5, 0);
  CameraIntrinsics intr;
  intr.dof_max = 0.5;
  EXPECT_TRUE(calculate_camera_view(w.mesh, w.grid, {at(w.grid, 5, 2, 2), {1, 0, 0}}, intr).empty());
}

TEST(CameraView, OwnVoxelIsNeverReported) {
  const auto w = make_room(10, 5, 5, 0);
  const VoxelId cam = at(w.grid, 5, 2, 2);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto view = calculate_camera_view(w.mesh, w.grid, {cam, sample_direction(rng)}, {});
    EXPECT_FALSE(std::binary_search(view.begin(), view.end(), cam));
  }
}

TEST(CameraView, VerticalDirectionIsAnError) {
  const auto w = make_room(10, 5, 5, 0);
  try {
    calculate_camera_view(w.mesh, w.grid, {at(w.grid, 5, 2, 2), {0, 1, 0}}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateOrientation);
  }
}

TEST(CameraView, InvalidConfig) {
  const auto w = make_room(10, 5, 5, 0);
  EXPECT_THROW(calculate_camera_view(w.mesh, w.grid, {100000, {1, 0, 0}}, {}), Error);
  EXPECT_THROW(calculate_camera_view(w.mesh, w.grid, {0, {2, 0, 0}}, {}), Error);
  CameraIntrinsics bad;
  bad.hfov = 4.0;
  EXPECT_THROW(calculate_camera_view(w.mesh, w.grid, {0, {1, 0, 0}}, bad), Error);
}

TEST(BruteForceView, SquareFovIsSymmetric) {
  // camera on the x axis of a room with equal y/z extents looking along +x:
  // swapping the transverse axes maps the visible set onto itself
  const auto w = make_room(9, 5, 5, 0);
  CameraIntrinsics intr;
  intr.hfov = intr.vfov = deg_to_rad(60);
  const auto view = brute_force_view(w.mesh, w.grid, {at(w.grid, 1, 2, 2), {1, 0, 0}}, intr);
  ASSERT_FALSE(view.empty());
  for (VoxelId v : view) {
    const Cell c = w.grid.free_cell(v);
    const VoxelId swapped = at(w.grid, c.i, c.k, c.j);
    EXPECT_TRUE(std::binary_search(view.begin(), view.end(), swapped));
  }
}

TEST(CameraView, SoundAndNearlyCompleteOnRandomRooms) {
  Rng rng(2024);
  double worst = 1.0;
  int pairs = 0;
  for (int r = 0; r < 12; ++r) {
    const int walls = static_cast<int>(rng.index(3));
    const auto w = make_room(20, 8, 8, walls, r % 2 ? WallOrient::kSameSide : WallOrient::kAlternate);
    const auto positions = camera_positions(w.grid);
    for (int i = 0; i < 8; ++i, ++pairs) {
      const CameraConfig cfg{positions[rng.index(positions.size())], sample_direction(rng)};
      const auto fill = calculate_camera_view(w.mesh, w.grid, cfg, {});
      const auto oracle = brute_force_view(w.mesh, w.grid, cfg, {});
      ASSERT_TRUE(subset(fill, oracle));
      if (walls == 0) {
        EXPECT_EQ(fill, oracle);
      }
      worst = std::min(worst, jaccard(fill, oracle));
    }
  }
  EXPECT_GE(worst, 0.99) << "over " << pairs << " pairs";
}

TEST(CameraView, CenterOnlyFillIsSound) {
  // the literal fill may miss voxels but never reports an invisible one
  Rng rng(5);
  const auto w = make_room(20, 8, 8, 2);
  const auto positions = camera_positions(w.grid);
  for (int i = 0; i < 40; ++i) {
    const CameraConfig cfg{positions[rng.index(positions.size())], sample_direction(rng)};
    const auto literal = calculate_camera_view(w.mesh, w.grid, cfg, {}, FillMode::kCenterOnly);
    EXPECT_TRUE(subset(literal, brute_force_view(w.mesh, w.grid, cfg, {})));
  }
}

TEST(CameraView, LargerDepthOfFieldNeverShrinks) {
  Rng rng(9);
  const auto w = make_room(20, 8, 8, 2);
  const auto positions = camera_positions(w.grid);
  for (int i = 0; i < 20; ++i) {
    const CameraConfig cfg{positions[rng.index(positions.size())], sample_direction(rng)};
    VoxelSet prev;
    for (double dof : {1.0, 2.5, 5.0, 10.0, 40.0}) {
      CameraIntrinsics intr;
      intr.dof_max = dof;
      const auto view = calculate_camera_view(w.mesh, w.grid, cfg, intr);
      EXPECT_TRUE(subset(prev, view));
      for (VoxelId v : view) EXPECT_LE(norm(w.grid.free_center(v) - w.grid.free_center(cfg.position)), dof);
      prev = view;
    }
  }
}

TEST(CameraView, MinimumDepthExcludesNearVoxels) {
  const auto w = make_room(10, 5, 5, 0);
  CameraIntrinsics intr;
  intr.dof_min = 3.0;
  const CameraConfig cfg{at(w.grid, 2, 2, 2), {1, 0, 0}};
  const auto view = calculate_camera_view(w.mesh, w.grid, cfg, intr);
  ASSERT_FALSE(view.empty());
  for (VoxelId v : view) EXPECT_GE(norm(w.grid.free_center(v) - w.grid.free_center(cfg.position)), 3.0);
  EXPECT_EQ(view, brute_force_view(w.mesh, w.grid, cfg, intr));
}

TEST(ComputeViews, IndependentOfThreadCount) {
  Rng rng(4);
  const auto w = make_room(20, 8, 8, 2);
  const auto positions = camera_positions(w.grid);
  std::vector<CameraConfig> cfgs;
  for (int i = 0; i < 40; ++i) cfgs.push_back({positions[rng.index(positions.size())], sample_direction(rng)});
  const auto one = compute_views(w.mesh, w.grid, cfgs, {}, 1);
  for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(compute_views(w.mesh, w.grid, cfgs, {}, t), one);
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    EXPECT_EQ(one[i], calculate_camera_view(w.mesh, w.grid, cfgs[i], {}));
  }
}

TEST(ComputeViews, PropagatesErrors) {
  const auto w = make_room(10, 5, 5, 0);
  std::vector<CameraConfig> cfgs(6, CameraConfig{0, {1, 0, 0}});
  cfgs[3].direction = {0, 1, 0};
  EXPECT_THROW(compute_views(w.mesh, w.grid, cfgs, {}, 3), Error);
}

TEST(InvertVisibility, SmallExample) {
  const std::vector<std::pair<std::size_t, VoxelSet>> views{{0, {1, 2}}, {1, {2}}};
  const auto inv = invert_visibility(views);
  ASSERT_EQ(inv.size(), 2u);
  EXPECT_EQ(inv.at(1), (std::vector<std::size_t>{0}));
  EXPECT_EQ(inv.at(2), (std::vector<std::size_t>{0, 1}));
}

TEST(InvertVisibility, EmptyInput) {
  EXPECT_TRUE(invert_visibility(std::vector<std::pair<std::size_t, VoxelSet>>{}).empty());
}

TEST(InvertVisibility, RoundTripOnRandomMaps) {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<std::size_t, VoxelSet>> views;
    const std::size_t n = rng.index(60);
    for (std::size_t i = 0; i < n; ++i) {
      VoxelSet s;
      for (VoxelId v = 0; v < 40; ++v) {
        if (rng.uniform(0, 1) < 0.2) s.push_back(v);
      }
      views.emplace_back(i, s);
    }
    // shuffled input order must not matter
    auto shuffled = views;
    std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
    const auto inv = invert_visibility(shuffled);
    std::vector<VoxelSet> rebuilt(n);
    for (const auto& [v, cfgs] : inv) {
      EXPECT_TRUE(std::is_sorted(cfgs.begin(), cfgs.end()));
      for (auto c : cfgs) rebuilt[c].push_back(v);
    }
    for (const auto& [i, s] : views) EXPECT_EQ(rebuilt[i], s);
  }
}

TEST(Jaccard, Basics) {
  EXPECT_EQ(jaccard({}, {}), 1.0);
  EXPECT_EQ(jaccard({1, 2}, {3}), 0.0);
  EXPECT_DOUBLE_EQ(jaccard({1, 2, 3}, {2, 3, 4}), 0.5);
}
