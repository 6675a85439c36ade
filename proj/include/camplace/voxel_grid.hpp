#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "camplace/error.hpp"
#include "camplace/geometry.hpp"
#include "camplace/mesh.hpp"

namespace camplace {

/// Dense index of a free voxel (0 .. free_count()-1).
using VoxelId = std::uint32_t;

struct Cell {
  int i = 0;
  int j = 0;
  int k = 0;

  constexpr bool operator==(const Cell&) const = default;
};

inline int chebyshev(const Cell& a, const Cell& b) {
  return std::max({std::abs(a.i - b.i), std::abs(a.j - b.j), std::abs(a.k - b.k)});
}

/// Axis-aligned cubic grid with free/closed occupancy.
class VoxelGrid {
 public:
  VoxelGrid() = default;

  VoxelGrid(const Vec3& origin, double voxel_size, std::array<int, 3> dims,
            std::vector<std::uint8_t> closed)
      : origin_(origin), voxel_size_(voxel_size), dims_(dims), closed_(std::move(closed)) {
    if (!(voxel_size_ > 0.0)) throw Error(ErrorCode::kInvalidParams, "voxel size must be > 0");
    if (closed_.size() != cell_count()) throw Error(ErrorCode::kInvalidParams, "occupancy size mismatch");
    free_of_cell_.assign(cell_count(), -1);
    for (std::size_t c = 0; c < cell_count(); ++c) {
      if (!closed_[c]) {
        free_of_cell_[c] = static_cast<std::int32_t>(cell_of_free_.size());
        cell_of_free_.push_back(static_cast<std::uint32_t>(c));
      }
    }
  }

  const Vec3& origin() const { return origin_; }
  double voxel_size() const { return voxel_size_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }
  std::size_t free_count() const { return cell_of_free_.size(); }

  bool in_bounds(const Cell& c) const {
    return c.i >= 0 && c.j >= 0 && c.k >= 0 && c.i < dims_[0] && c.j < dims_[1] && c.k < dims_[2];
  }
  std::size_t linear(const Cell& c) const {
    return static_cast<std::size_t>(c.i) +
           static_cast<std::size_t>(dims_[0]) * (c.j + static_cast<std::size_t>(dims_[1]) * c.k);
  }
  Cell cell(std::size_t linear) const {
    const int i = static_cast<int>(linear % dims_[0]);
    const std::size_t rest = linear / dims_[0];
    return {i, static_cast<int>(rest % dims_[1]), static_cast<int>(rest / dims_[1])};
  }
  bool closed(std::size_t linear) const { return closed_[linear] != 0; }
  bool is_free(const Cell& c) const { return in_bounds(c) && !closed_[linear(c)]; }
  const std::vector<std::uint8_t>& occupancy() const { return closed_; }

  Vec3 center(const Cell& c) const {
    return origin_ + Vec3{c.i + 0.5, c.j + 0.5, c.k + 0.5} * voxel_size_;
  }

  std::optional<Cell> cell_containing(const Vec3& p) const {
    const Vec3 q = (p - origin_) / voxel_size_;
    const Cell c{static_cast<int>(std::floor(q.x)), static_cast<int>(std::floor(q.y)),
                 static_cast<int>(std::floor(q.z))};
    if (!in_bounds(c)) return std::nullopt;
    return c;
  }

  std::optional<VoxelId> free_id(const Cell& c) const {
    if (!in_bounds(c)) return std::nullopt;
    const auto f = free_of_cell_[linear(c)];
    if (f < 0) return std::nullopt;
    return static_cast<VoxelId>(f);
  }
  Cell free_cell(VoxelId v) const { return cell(cell_of_free_[v]); }
  Vec3 free_center(VoxelId v) const { return center(free_cell(v)); }

 private:
  Vec3 origin_;
  double voxel_size_ = 1.0;
  std::array<int, 3> dims_{0, 0, 0};
  std::vector<std::uint8_t> closed_;
  std::vector<std::int32_t> free_of_cell_;
  std::vector<std::uint32_t> cell_of_free_;
};

inline constexpr std::array<Cell, 6> kFaceNeighbours{
    Cell{1, 0, 0}, Cell{-1, 0, 0}, Cell{0, 1, 0}, Cell{0, -1, 0}, Cell{0, 0, 1}, Cell{0, 0, -1}};

inline Cell operator+(const Cell& a, const Cell& b) { return {a.i + b.i, a.j + b.j, a.k + b.k}; }

/// Voxelizes a closed surface.
///
/// A voxel is closed when a triangle passes through its open cube. The rest
/// are flood-filled (6-connected) from the interior seed, or split into
/// components with the largest kept when no seed is given; a step between two
/// neighbours is blocked when a triangle crosses the segment joining their
/// centers, which also catches surfaces lying exactly on voxel faces. Voxels
/// the fill never reaches (outside the shell, sealed pockets) are closed.
inline VoxelGrid voxelize(const TriangleMesh& mesh, double voxel_size,
                          std::optional<Vec3> interior_seed = std::nullopt) {
  if (mesh.empty()) throw Error(ErrorCode::kEmptyMesh, "cannot voxelize an empty mesh");
  if (!(voxel_size > 0.0)) throw Error(ErrorCode::kInvalidParams, "voxel size must be > 0");

  const Vec3 origin = mesh.bounds.lo;
  const Vec3 ext = mesh.bounds.extent();
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) dims[a] = std::max(1, static_cast<int>(std::ceil(ext[a] / voxel_size - 1e-9)));
  const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  VoxelGrid shape(origin, voxel_size, dims, std::vector<std::uint8_t>(n, 0));

  std::vector<std::uint8_t> closed(n, 0);
  std::vector<std::vector<std::uint32_t>> buckets(n);
  const Vec3 half{0.5 * voxel_size, 0.5 * voxel_size, 0.5 * voxel_size};
  auto clamp_axis = [&](double v, int a) {
    return std::clamp(static_cast<int>(std::floor((v - origin[a]) / voxel_size)), 0, dims[a] - 1);
  };
  for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) {
    Aabb box;
    box.extend(mesh.triangles[t]);
    Cell lo{clamp_axis(box.lo.x - 1e-9, 0), clamp_axis(box.lo.y - 1e-9, 1), clamp_axis(box.lo.z - 1e-9, 2)};
    Cell hi{clamp_axis(box.hi.x + 1e-9, 0), clamp_axis(box.hi.y + 1e-9, 1), clamp_axis(box.hi.z + 1e-9, 2)};
    for (int k = lo.k; k <= hi.k; ++k)
      for (int j = lo.j; j <= hi.j; ++j)
        for (int i = lo.i; i <= hi.i; ++i) {
          const Cell c{i, j, k};
          const std::size_t id = shape.linear(c);
          buckets[id].push_back(t);
          if (!closed[id] && triangle_overlaps_box(mesh.triangles[t], shape.center(c), half)) closed[id] = 1;
        }
  }

  auto step_blocked = [&](std::size_t a, std::size_t b, const Vec3& from, const Vec3& dir) {
    for (const auto* bucket : {&buckets[a], &buckets[b]}) {
      for (auto t : *bucket) {
        if (auto hit = ray_triangle_intersect(from, dir, mesh.triangles[t]); hit && *hit <= voxel_size + 1e-9) {
          return true;
        }
      }
    }
    return false;
  };

  // Labels the component of `start` with `label`; returns its size.
  std::vector<std::uint32_t> label(n, 0);
  auto fill = [&](const Cell& start, std::uint32_t tag) {
    std::size_t size = 1;
    std::deque<Cell> queue{start};
    label[shape.linear(start)] = tag;
    while (!queue.empty()) {
      const Cell c = queue.front();
      queue.pop_front();
      const std::size_t a = shape.linear(c);
      const Vec3 from = shape.center(c);
      for (const auto& d : kFaceNeighbours) {
        const Cell nb = c + d;
        if (!shape.in_bounds(nb)) continue;
        const std::size_t b = shape.linear(nb);
        if (label[b] || closed[b]) continue;
        if (step_blocked(a, b, from, Vec3{double(d.i), double(d.j), double(d.k)})) continue;
        label[b] = tag;
        queue.push_back(nb);
        ++size;
      }
    }
    return size;
  };

  std::uint32_t keep = 0;
  if (interior_seed) {
    const auto seed = shape.cell_containing(*interior_seed);
    if (!seed || closed[shape.linear(*seed)]) {
      throw Error(ErrorCode::kInvalidParams, "interior seed is outside the grid or inside geometry");
    }
    keep = 1;
    fill(*seed, keep);
  } else {
    // Without a seed the largest component is the interior: cells inside
    // solid obstacles whose faces lie on voxel boundaries touch no triangle,
    // so they form sealed pockets of their own.
    std::size_t best = 0;
    std::uint32_t next = 0;
    for (std::size_t id = 0; id < n; ++id) {
      if (closed[id] || label[id]) continue;
      const std::size_t size = fill(shape.cell(id), ++next);
      if (size > best) {
        best = size;
        keep = next;
      }
    }
    if (keep == 0) throw Error(ErrorCode::kEmptyFreeSpace, "every voxel intersects the mesh");
  }
  std::vector<std::uint8_t> reached(n, 0);
  for (std::size_t c = 0; c < n; ++c) reached[c] = label[c] == keep;
  for (std::size_t c = 0; c < n; ++c) closed[c] = reached[c] ? 0 : 1;
  return VoxelGrid(origin, voxel_size, dims, std::move(closed));
}

/// Optional restriction of camera positions to a height band (world y of
/// the voxel center). Without a band every free voxel is a position.
inline std::vector<VoxelId> camera_positions(const VoxelGrid& grid,
                                             std::optional<std::pair<double, double>> y_band = std::nullopt) {
  std::vector<VoxelId> out;
  for (VoxelId v = 0; v < grid.free_count(); ++v) {
    if (y_band) {
      const double y = grid.free_center(v).y;
      if (y < y_band->first || y > y_band->second) continue;
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace camplace
