#pragma once

#include <span>
#include <vector>

#include "camplace/error.hpp"
#include "camplace/voxel_grid.hpp"

namespace camplace {

/// Coarse blocks of super_size^3 voxels (boundary blocks truncated) with the
/// number of uncovered free voxels inside each.
struct SupervoxelGrid {
  int super_size = 5;
  std::array<int, 3> blocks{0, 0, 0};
  std::vector<Vec3> centers;
  std::vector<std::size_t> uncovered;

  std::size_t size() const { return centers.size(); }
  std::size_t total_uncovered() const {
    std::size_t s = 0;
    for (auto c : uncovered) s += c;
    return s;
  }
};

inline SupervoxelGrid supervoxel_counts(const VoxelGrid& grid, std::span<const VoxelId> uncovered,
                                        int super_size) {
  if (super_size < 1) throw Error(ErrorCode::kInvalidParams, "supervoxel size must be >= 1");
  SupervoxelGrid sg;
  sg.super_size = super_size;
  const auto& dims = grid.dims();
  for (int a = 0; a < 3; ++a) sg.blocks[a] = (dims[a] + super_size - 1) / super_size;
  const std::size_t nblocks = static_cast<std::size_t>(sg.blocks[0]) * sg.blocks[1] * sg.blocks[2];
  sg.centers.resize(nblocks);
  sg.uncovered.assign(nblocks, 0);

  auto block_of = [&](const Cell& c) {
    return static_cast<std::size_t>(c.i / super_size) +
           static_cast<std::size_t>(sg.blocks[0]) *
               (c.j / super_size + static_cast<std::size_t>(sg.blocks[1]) * (c.k / super_size));
  };
  for (int bk = 0; bk < sg.blocks[2]; ++bk)
    for (int bj = 0; bj < sg.blocks[1]; ++bj)
      for (int bi = 0; bi < sg.blocks[0]; ++bi) {
        const Cell lo{bi * super_size, bj * super_size, bk * super_size};
        const Cell hi{std::min(lo.i + super_size, dims[0]), std::min(lo.j + super_size, dims[1]),
                      std::min(lo.k + super_size, dims[2])};
        // centroid of the (possibly truncated) block in world coordinates
        const Vec3 mid{0.5 * (lo.i + hi.i), 0.5 * (lo.j + hi.j), 0.5 * (lo.k + hi.k)};
        sg.centers[block_of(lo)] = grid.origin() + mid * grid.voxel_size();
      }
  for (VoxelId v : uncovered) {
    if (v >= grid.free_count()) throw Error(ErrorCode::kInvalidParams, "uncovered id is not a free voxel");
    ++sg.uncovered[block_of(grid.free_cell(v))];
  }
  return sg;
}

}  // namespace camplace
