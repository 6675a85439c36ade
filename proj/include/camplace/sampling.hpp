#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <tuple>
#include <vector>

#include "camplace/error.hpp"
#include "camplace/geometry.hpp"
#include "camplace/mesh.hpp"
#include "camplace/rng.hpp"
#include "camplace/supervoxel.hpp"
#include "camplace/visibility.hpp"
#include "camplace/voxel_grid.hpp"

namespace camplace {

enum class Provenance : std::uint8_t { kRandom, kExploit, kTargeted };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kRandom: return "random";
    case Provenance::kExploit: return "exploit";
    case Provenance::kTargeted: return "targeted";
  }
  return "?";
}

struct Candidate {
  CameraConfig config;
  Provenance provenance = Provenance::kRandom;
};

struct ConfigBatch {
  std::vector<Candidate> items;
  // Set when an adaptive strategy had nothing to adapt to and drew its
  // informed share at random instead.
  bool fallback_random = false;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

/// Identity of a configuration for duplicate detection: the voxel plus the
/// direction quantized to 1e-6 per component.
using ConfigKey = std::tuple<VoxelId, std::int64_t, std::int64_t, std::int64_t>;

inline constexpr double kDirectionQuantum = 1e-6;

inline ConfigKey config_key(const CameraConfig& c) {
  auto q = [](double v) { return static_cast<std::int64_t>(std::llround(v / kDirectionQuantum)); };
  return {c.position, q(c.direction.x), q(c.direction.y), q(c.direction.z)};
}

// Drops repeated keys, keeping the first occurrence.
inline void dedupe_batch(ConfigBatch& batch) {
  std::set<ConfigKey> seen;
  std::vector<Candidate> kept;
  kept.reserve(batch.items.size());
  for (const auto& c : batch.items) {
    if (seen.insert(config_key(c.config)).second) kept.push_back(c);
  }
  batch.items = std::move(kept);
}

// Round half up, the integer rounding used for all sample-count splits.
inline std::size_t round_count(double v) {
  return v <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(v + 0.5));
}

struct EEParams {
  std::size_t n_pos = 10;
  std::size_t n_dir_pos = 8;
  double f_exploit = 0.6;
  double theta_jitter = deg_to_rad(30.0);
  int v_jitter = 1;

  void validate() const {
    if (n_pos < 1 || n_dir_pos < 1) throw Error(ErrorCode::kInvalidParams, "n_pos and n_dir_pos must be >= 1");
    if (!(f_exploit >= 0.0 && f_exploit <= 1.0)) throw Error(ErrorCode::kInvalidParams, "f_exploit must lie in [0, 1]");
    if (!(theta_jitter >= 0.0 && theta_jitter < std::numbers::pi)) {
      throw Error(ErrorCode::kInvalidParams, "theta_jitter must lie in [0, pi)");
    }
    if (v_jitter < 0) throw Error(ErrorCode::kInvalidParams, "v_jitter must be >= 0");
  }
};

struct TUSParams {
  std::size_t n_pos = 10;
  std::size_t n_dir_pos = 8;
  double f_unc = 0.4;
  int super_size = 5;
  bool strict_vis_req = false;

  void validate() const {
    if (n_pos < 1 || n_dir_pos < 1) throw Error(ErrorCode::kInvalidParams, "n_pos and n_dir_pos must be >= 1");
    if (!(f_unc >= 0.0 && f_unc <= 1.0)) throw Error(ErrorCode::kInvalidParams, "f_unc must lie in [0, 1]");
    if (super_size < 1) throw Error(ErrorCode::kInvalidParams, "super_size must be >= 1");
  }
};

/// Isotropic unit direction (normalized standard normal), redrawn when it
/// is vertical.
inline Vec3 sample_direction(Rng& rng) {
  for (;;) {
    const Vec3 g{rng.normal(), rng.normal(), rng.normal()};
    const double len = norm(g);
    if (len < 1e-12) continue;
    const Vec3 d = g / len;
    if (!is_vertical(d)) return d;
  }
}

/// n_pos positions drawn uniformly from `positions`, each paired with
/// n_dir_pos random directions.
inline ConfigBatch sample_random_configurations(std::size_t n_pos, std::span<const VoxelId> positions,
                                                std::size_t n_dir_pos, Rng& rng) {
  if (positions.empty()) throw Error(ErrorCode::kEmptyFreeSpace, "no camera positions to sample");
  ConfigBatch batch;
  batch.items.reserve(n_pos * n_dir_pos);
  for (std::size_t p = 0; p < n_pos; ++p) {
    const VoxelId pos = positions[rng.index(positions.size())];
    for (std::size_t d = 0; d < n_dir_pos; ++d) {
      batch.items.push_back({{pos, sample_direction(rng)}, Provenance::kRandom});
    }
  }
  return batch;
}

namespace detail {

inline std::vector<std::uint8_t> position_mask(const VoxelGrid& grid, std::span<const VoxelId> positions) {
  std::vector<std::uint8_t> mask(grid.free_count(), 0);
  for (VoxelId v : positions) mask.at(v) = 1;
  return mask;
}

inline void append(ConfigBatch& into, const ConfigBatch& from) {
  into.items.insert(into.items.end(), from.items.begin(), from.items.end());
}

}  // namespace detail

/// Explore-and-Exploit sampler.
///
/// N_tot = n_pos * n_dir_pos samples split into a random explore share and
/// an exploit share spread evenly over the previous solution. Each exploit
/// child moves its parent by an integer offset of at most v_jitter per axis
/// (redrawn until it lands on a legal position) and tilts the parent
/// direction by a spherical-cap sample of half-angle theta_jitter. With no
/// previous solution the whole batch is random.
inline ConfigBatch explore_and_exploit(const EEParams& params, const VoxelGrid& grid,
                                       std::span<const VoxelId> positions,
                                       std::span<const CameraConfig> prev_solution, Rng& rng) {
  params.validate();
  const std::size_t n_tot = params.n_pos * params.n_dir_pos;
  if (prev_solution.empty()) {
    ConfigBatch batch = sample_random_configurations(params.n_pos, positions, params.n_dir_pos, rng);
    batch.fallback_random = params.f_exploit > 0.0;
    dedupe_batch(batch);
    return batch;
  }

  const std::size_t n_explore = round_count(n_tot * (1.0 - params.f_exploit));
  const std::size_t n_pos_explore = (n_explore + params.n_dir_pos - 1) / params.n_dir_pos;
  ConfigBatch batch = sample_random_configurations(n_pos_explore, positions, params.n_dir_pos, rng);

  const std::size_t n_sol = prev_solution.size();
  const std::size_t n_exploit = round_count(n_tot * params.f_exploit);
  const std::size_t per_parent = round_count(static_cast<double>(n_exploit) / n_sol);
  const std::vector<Vec3> cap = sample_spherical_cap(params.theta_jitter, n_sol * per_parent, rng);
  const auto legal = detail::position_mask(grid, positions);

  for (std::size_t i = 0; i < n_sol; ++i) {
    const CameraConfig& parent = prev_solution[i];
    const Cell base = grid.free_cell(parent.position);
    for (std::size_t j = 0; j < per_parent; ++j) {
      VoxelId pos = parent.position;
      for (int attempt = 0; attempt < 100000; ++attempt) {
        const Cell off{static_cast<int>(rng.uniform_int(-params.v_jitter, params.v_jitter)),
                       static_cast<int>(rng.uniform_int(-params.v_jitter, params.v_jitter)),
                       static_cast<int>(rng.uniform_int(-params.v_jitter, params.v_jitter))};
        if (auto id = grid.free_id(base + off); id && legal[*id]) {
          pos = *id;
          break;
        }
      }
      Vec3 tilt = cap[i * per_parent + j];
      Vec3 dir = rotate_along(kZAxis, tilt, parent.direction);
      while (is_vertical(dir)) {
        tilt = sample_spherical_cap(params.theta_jitter, 1, rng).front();
        dir = rotate_along(kZAxis, tilt, parent.direction);
      }
      batch.items.push_back({{pos, normalized(dir)}, Provenance::kExploit});
    }
  }
  dedupe_batch(batch);
  return batch;
}

/// Farthest free voxel from `target` along the ray through `toward`, such
/// that the segment back to `target` is clear of the mesh. Marches in
/// voxel-pitch steps and stops at the first closed voxel, grid exit, or
/// occluded step.
inline VoxelId linear_visibility(VoxelId toward, const Vec3& target, const VoxelGrid& grid,
                                 const TriangleMesh& mesh) {
  const Vec3 delta = grid.free_center(toward) - target;
  const double len = norm(delta);
  if (len < 1e-9) throw Error(ErrorCode::kInvalidParams, "target coincides with the position");
  const Vec3 u = delta / len;

  auto clear_to_target = [&](const Vec3& from) {
    const Vec3 back = target - from;
    const double dist = norm(back);
    if (dist < 1e-9) return true;
    const auto hit = ray_first_hit(from, back / dist, mesh.triangles);
    return !hit || hit->t >= dist;
  };

  std::optional<VoxelId> best;
  for (int k = 1;; ++k) {
    const Vec3 q = target + u * (k * grid.voxel_size());
    const auto cell = grid.cell_containing(q);
    if (!cell) break;
    const auto id = grid.free_id(*cell);
    if (!id) break;
    if (!clear_to_target(grid.center(*cell))) break;
    best = *id;
  }
  if (best) return *best;
  if (auto home = grid.cell_containing(target)) {
    if (auto id = grid.free_id(*home)) return *id;
  }
  throw Error(ErrorCode::kNoPosition, "no free voxel on the ray from the target");
}

/// Target-Uncovered-Spaces sampler.
///
/// A random share plus n_tot * f_unc targeted configs: a supervoxel center
/// is drawn with probability proportional to its uncovered count, a position
/// is drawn uniformly (optionally pushed back along the line of sight with
/// linear_visibility), and the camera looks at the center. With nothing left
/// uncovered the targeted share is drawn at random.
inline ConfigBatch target_uncovered_spaces(const TUSParams& params, const VoxelGrid& grid,
                                           const TriangleMesh& mesh, std::span<const VoxelId> positions,
                                           const SupervoxelGrid& supergrid, Rng& rng) {
  params.validate();
  if (positions.empty()) throw Error(ErrorCode::kEmptyFreeSpace, "no camera positions to sample");
  const std::size_t n_tot = params.n_pos * params.n_dir_pos;
  const std::size_t n_random = round_count(n_tot * (1.0 - params.f_unc));
  const std::size_t n_pos_random = (n_random + params.n_dir_pos - 1) / params.n_dir_pos;
  ConfigBatch batch = sample_random_configurations(n_pos_random, positions, params.n_dir_pos, rng);

  const std::size_t n_targeted = round_count(n_tot * params.f_unc);
  const std::size_t total = supergrid.total_uncovered();
  if (total == 0) {
    const std::size_t extra_pos = (n_targeted + params.n_dir_pos - 1) / params.n_dir_pos;
    detail::append(batch, sample_random_configurations(extra_pos, positions, params.n_dir_pos, rng));
    batch.fallback_random = n_targeted > 0;
    dedupe_batch(batch);
    return batch;
  }

  std::vector<double> cumulative(supergrid.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < supergrid.size(); ++s) {
    acc += static_cast<double>(supergrid.uncovered[s]) / static_cast<double>(total);
    cumulative[s] = acc;
  }
  auto draw_block = [&] {
    const double u = rng.uniform(0.0, 1.0);
    for (std::size_t s = 0; s < cumulative.size(); ++s) {
      if (u < cumulative[s] && supergrid.uncovered[s] > 0) return s;
    }
    // u landed in the rounding slack above the last partial sum
    for (std::size_t s = cumulative.size(); s-- > 0;) {
      if (supergrid.uncovered[s] > 0) return s;
    }
    return std::size_t{0};
  };

  for (std::size_t t = 0; t < n_targeted; ++t) {
    const Vec3 center = supergrid.centers[draw_block()];
    for (int attempt = 0; attempt < 1000; ++attempt) {
      VoxelId pos = positions[rng.index(positions.size())];
      if (norm(grid.free_center(pos) - center) < 1e-9) continue;
      if (params.strict_vis_req) {
        try {
          pos = linear_visibility(pos, center, grid, mesh);
        } catch (const Error&) {
          continue;
        }
      }
      const Vec3 to_center = center - grid.free_center(pos);
      const double len = norm(to_center);
      if (len < 1e-9) continue;
      const Vec3 dir = to_center / len;
      if (is_vertical(dir)) continue;
      batch.items.push_back({{pos, dir}, Provenance::kTargeted});
      break;
    }
  }
  dedupe_batch(batch);
  return batch;
}

}  // namespace camplace
