#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <iterator>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "camplace/error.hpp"
#include "camplace/geometry.hpp"
#include "camplace/mesh.hpp"
#include "camplace/voxel_grid.hpp"

namespace camplace {

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Shared lens model. Defaults: 90 degree horizontal FOV, 4:3 aspect
/// (73 degree vertical), unbounded depth of field.
struct CameraIntrinsics {
  double hfov = deg_to_rad(90.0);
  double vfov = deg_to_rad(73.0);
  double dof_min = 0.0;
  double dof_max = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(hfov > 0.0 && hfov < std::numbers::pi && vfov > 0.0 && vfov < std::numbers::pi)) {
      throw Error(ErrorCode::kInvalidParams, "field of view must lie in (0, pi)");
    }
    if (!(dof_min >= 0.0 && dof_min < dof_max)) {
      throw Error(ErrorCode::kInvalidParams, "depth of field requires 0 <= dof_min < dof_max");
    }
  }
};

struct CameraConfig {
  VoxelId position = 0;
  Vec3 direction{1.0, 0.0, 0.0};
};

/// Sorted, duplicate-free list of free-voxel ids.
using VoxelSet = std::vector<VoxelId>;

namespace detail {

inline void check_config(const VoxelGrid& grid, const CameraConfig& config) {
  if (config.position >= grid.free_count()) {
    throw Error(ErrorCode::kInvalidParams, "camera position is not a free voxel");
  }
  if (std::abs(norm(config.direction) - 1.0) > 1e-6) {
    throw Error(ErrorCode::kInvalidParams, "camera direction must be unit length");
  }
}

// True when the in-plane part of `offset` lies inside the non-reflex wedge
// spanned by `a` and `b` (both unit, from the apex). `normal` is the unit
// normal of the plane oriented as a x b.
inline bool in_wedge(const Vec3& offset, const Vec3& a, const Vec3& b, const Vec3& normal) {
  const Vec3 proj = offset - normal * dot(offset, normal);
  const double len = norm(proj);
  if (len < 1e-12) return false;
  const double tol = 1e-9 * len;
  return dot(cross(a, proj), normal) >= -tol && dot(cross(proj, b), normal) >= -tol;
}

inline bool unoccluded_within_dof(const TriangleMesh& mesh, const Vec3& eye, const Vec3& offset,
                                  const CameraIntrinsics& intr) {
  const double dist = norm(offset);
  if (dist < intr.dof_min) return false;
  if (dist > intr.dof_max) return false;
  const auto hit = ray_first_hit(eye, offset / dist, mesh.triangles);
  const double reach = hit ? std::min(hit->t, intr.dof_max) : intr.dof_max;
  return reach >= dist;
}

}  // namespace detail

/// How the flood fill decides which voxels to expand through.
enum class FillMode {
  /// Expand through every voxel whose cube touches the view pyramid; only
  /// voxels whose centers pass the FOV test are collected. The touched cubes
  /// of a convex region are face-connected, so no in-view voxel is cut off
  /// from the camera in open space.
  kPyramidTouch,
  /// Expand only through voxels whose centers pass the FOV test, seeded from
  /// the camera's six face neighbours. Misses the whole view when no face
  /// neighbour center lies inside the frustum (steeply pitched cameras).
  kCenterOnly,
};

/// Flood-fill frustum visibility.
///
/// Starting from the six face neighbours of the camera voxel, the fill
/// expands through free voxels (see FillMode) and collects those whose
/// offset from the eye lies inside both FOV wedges. Collected voxels are
/// then kept when nothing in the mesh is hit before them and they lie inside
/// the depth-of-field band. The camera's own voxel has no offset direction
/// and is never reported.
inline VoxelSet calculate_camera_view(const TriangleMesh& mesh, const VoxelGrid& grid,
                                      const CameraConfig& config, const CameraIntrinsics& intr,
                                      FillMode mode = FillMode::kPyramidTouch) {
  detail::check_config(grid, config);
  const Cell cam = grid.free_cell(config.position);
  const Vec3 eye = grid.center(cam);
  const FrustumCorners fc = frustum_corners(eye, config.direction, intr.hfov, intr.vfov);
  const Vec3 w1 = fc.w1 - eye, w2 = fc.w2 - eye, h1 = fc.h1 - eye, h2 = fc.h2 - eye;
  const Vec3 wn = normalized(cross(w1, w2));
  const Vec3 hn = normalized(cross(h1, h2));

  // Inward normals of the four side planes of the view pyramid.
  std::array<Vec3, 4> sides{normalized(cross(wn, w1)), normalized(cross(wn, w2)),
                            normalized(cross(hn, h1)), normalized(cross(hn, h2))};
  for (auto& n : sides) {
    if (dot(n, config.direction) < 0.0) n = -n;
  }
  const double half = 0.5 * grid.voxel_size();
  auto touches_pyramid = [&](const Vec3& offset) {
    for (const auto& n : sides) {
      const double reach = half * (std::abs(n.x) + std::abs(n.y) + std::abs(n.z));
      if (dot(n, offset) + reach < -1e-9) return false;
    }
    return true;
  };

  std::vector<std::uint8_t> visited(grid.cell_count(), 0);
  visited[grid.linear(cam)] = 1;
  std::vector<Cell> stack;
  std::vector<Cell> in_fov;
  for (const auto& d : kFaceNeighbours) stack.push_back(cam + d);
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    if (!grid.in_bounds(c)) continue;
    const std::size_t id = grid.linear(c);
    if (visited[id] || grid.closed(id)) continue;
    visited[id] = 1;
    const Vec3 offset = grid.center(c) - eye;
    const bool inside = detail::in_wedge(offset, w1, w2, wn) && detail::in_wedge(offset, h1, h2, hn);
    if (inside) in_fov.push_back(c);
    const bool expand = mode == FillMode::kCenterOnly ? inside : touches_pyramid(offset);
    if (expand) {
      for (const auto& d : kFaceNeighbours) stack.push_back(c + d);
    }
  }

  VoxelSet out;
  for (const Cell& c : in_fov) {
    if (detail::unoccluded_within_dof(mesh, eye, grid.center(c) - eye, intr)) out.push_back(*grid.free_id(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Independent per-voxel oracle: angular FOV test via atan2 in the camera
/// frame, depth of field, and a mesh ray cast, for every free voxel with no
/// connectivity assumption.
inline VoxelSet brute_force_view(const TriangleMesh& mesh, const VoxelGrid& grid,
                                 const CameraConfig& config, const CameraIntrinsics& intr) {
  detail::check_config(grid, config);
  const CameraFrame f = camera_frame(config.direction);
  const Vec3 eye = grid.free_center(config.position);
  const double half_h = 0.5 * intr.hfov + 1e-9;
  const double half_v = 0.5 * intr.vfov + 1e-9;
  VoxelSet out;
  for (VoxelId v = 0; v < grid.free_count(); ++v) {
    if (v == config.position) continue;
    const Vec3 offset = grid.free_center(v) - eye;
    const double fwd = dot(offset, f.forward);
    if (std::atan2(std::abs(dot(offset, f.right)), fwd) > half_h) continue;
    if (std::atan2(std::abs(dot(offset, f.up)), fwd) > half_v) continue;
    if (detail::unoccluded_within_dof(mesh, eye, offset, intr)) out.push_back(v);
  }
  return out;
}

/// Voxel -> configuration indices, each list ascending.
using InvertedVisibility = std::map<VoxelId, std::vector<std::size_t>>;

inline InvertedVisibility invert_visibility(std::span<const std::pair<std::size_t, VoxelSet>> views) {
  std::vector<std::pair<std::size_t, const VoxelSet*>> ordered;
  ordered.reserve(views.size());
  for (const auto& [idx, set] : views) ordered.emplace_back(idx, &set);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  InvertedVisibility inv;
  for (const auto& [idx, set] : ordered) {
    for (VoxelId v : *set) inv[v].push_back(idx);
  }
  return inv;
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Batch evaluation. Each configuration is independent; results land in
/// input order so the output does not depend on the schedule.
inline std::vector<VoxelSet> compute_views(const TriangleMesh& mesh, const VoxelGrid& grid,
                                           std::span<const CameraConfig> configs,
                                           const CameraIntrinsics& intr, unsigned threads = 0) {
  std::vector<VoxelSet> out(configs.size());
  const unsigned workers = std::min<unsigned>(resolve_threads(threads), std::max<std::size_t>(1, configs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) out[i] = calculate_camera_view(mesh, grid, configs[i], intr);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
          try {
            out[i] = calculate_camera_view(mesh, grid, configs[i], intr);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline double jaccard(const VoxelSet& a, const VoxelSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<VoxelId> inter;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  return static_cast<double>(inter.size()) / static_cast<double>(a.size() + b.size() - inter.size());
}

}  // namespace camplace
