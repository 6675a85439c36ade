#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "camplace/error.hpp"
#include "camplace/mesh.hpp"
#include "camplace/rng.hpp"

namespace camplace {

enum class WallOrient { kAlternate, kSameSide };

inline const char* to_string(WallOrient o) {
  return o == WallOrient::kAlternate ? "alternate" : "same-side";
}

/// Parametric cuboid room with interior partition walls. Lengths are in
/// voxel units: x = length, y = height (world up), z = breadth.
struct RoomParams {
  int length = 10;
  int height = 5;
  int breadth = 5;
  int num_walls = 0;
  double y_wall_edge_ratio = 1.0;
  double z_wall_edge_ratio = 0.6;
  int wall_width = 1;
  double random_range = 0.0;
  std::uint64_t seed = 0;
  WallOrient wall_orient = WallOrient::kAlternate;
};

/// One partition slab as an axis-aligned box.
struct WallSlab {
  Vec3 lo;
  Vec3 hi;
};

// Triangulated surface of an axis-aligned box (12 triangles).
inline void add_box(std::vector<Triangle>& out, const Vec3& lo, const Vec3& hi) {
  const Vec3 p[8] = {
      {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
      {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z},
  };
  constexpr int quads[6][4] = {
      {0, 3, 2, 1}, {4, 5, 6, 7},  // z faces
      {0, 1, 5, 4}, {3, 7, 6, 2},  // y faces
      {0, 4, 7, 3}, {1, 2, 6, 5},  // x faces
  };
  for (const auto& q : quads) {
    out.push_back({p[q[0]], p[q[1]], p[q[2]]});
    out.push_back({p[q[0]], p[q[2]], p[q[3]]});
  }
}

inline int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

// Wall x positions are snapped to whole voxels so slab faces fall on voxel
// boundaries.
inline std::vector<WallSlab> room_walls(const RoomParams& p) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidParams, what); };
  if (p.length < 1 || p.height < 1 || p.breadth < 1) fail("room dimensions must be >= 1");
  if (p.num_walls < 0) fail("num_walls must be >= 0");
  auto unit = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!unit(p.y_wall_edge_ratio) || !unit(p.z_wall_edge_ratio)) fail("wall edge ratios must lie in [0, 1]");
  if (!unit(p.random_range)) fail("random_range must lie in [0, 1]");

  std::vector<WallSlab> walls;
  if (p.num_walls == 0) return walls;
  if (p.wall_width < 1) fail("wall_width must be >= 1");

  const int wall_h = round_half_up(p.y_wall_edge_ratio * p.height);
  const int wall_b = round_half_up(p.z_wall_edge_ratio * p.breadth);
  if (wall_h < 1 || wall_b < 1) fail("wall cross-section rounds to zero voxels");
  if (wall_h >= p.height && wall_b >= p.breadth) fail("partition would seal the room");

  Rng rng(p.seed);
  const double interval = static_cast<double>(p.length) / (p.num_walls + 1);
  int prev_end = 0;
  for (int i = 0; i < p.num_walls; ++i) {
    const double u = rng.uniform(-1.0, 1.0);
    const int x0 = round_half_up((i + 1) * interval + u * p.random_range * interval);
    const int x1 = x0 + p.wall_width;
    if (x0 < prev_end + 1 || x1 > p.length - 1) {
      fail("wall " + std::to_string(i) + " overlaps the shell or a neighbouring wall");
    }
    prev_end = x1;
    const bool far_side = p.wall_orient == WallOrient::kAlternate && i % 2 == 1;
    const double z0 = far_side ? p.breadth - wall_b : 0.0;
    walls.push_back({{double(x0), 0.0, z0}, {double(x1), double(wall_h), z0 + wall_b}});
  }
  return walls;
}

/// Closed shell of the room plus one box per partition; deterministic in
/// the params (including the seed).
inline TriangleMesh generate_room(const RoomParams& p) {
  const auto walls = room_walls(p);
  std::vector<Triangle> tris;
  add_box(tris, {0, 0, 0}, {double(p.length), double(p.height), double(p.breadth)});
  for (const auto& w : walls) add_box(tris, w.lo, w.hi);
  return validated(std::move(tris));
}

// Free interior volume in voxels at voxel size 1 (walls never overlap).
inline long long analytic_free_volume(const RoomParams& p) {
  long long total = static_cast<long long>(p.length) * p.height * p.breadth;
  for (const auto& w : room_walls(p)) {
    const Vec3 e = w.hi - w.lo;
    total -= std::llround(e.x * e.y * e.z);
  }
  return total;
}

}  // namespace camplace
