#pragma once

// Independent reference implementations used by the tests. Nothing here
// shares code with the library routines they check.

#include <algorithm>
#include <cstdlib>
#include <cstdint>
#include <set>
#include <vector>

#include "camplace/rng.hpp"
#include "camplace/solver.hpp"

namespace camplace::oracle {

struct BruteForceResult {
  std::size_t objective = 0;
  std::vector<std::size_t> selection;  // first optimum in bitmask order
};

// Exhaustive search over all subsets (n <= ~20).
inline BruteForceResult best_subset(const CoverageInstance& inst) {
  const std::size_t n = inst.size();
  BruteForceResult best;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double cost = 0.0;
    bool ok = true;
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      cost += inst.costs[i];
      for (auto j : chosen) {
        const Cell &a = inst.cells[i], &b = inst.cells[j];
        const int d = std::max({std::abs(a.i - b.i), std::abs(a.j - b.j), std::abs(a.k - b.k)});
        if (d <= inst.locale_radius) ok = false;
      }
      chosen.push_back(i);
    }
    if (!ok || cost > inst.budget + 1e-9) continue;
    std::set<VoxelId> covered;
    for (auto i : chosen) covered.insert(inst.sets[i].begin(), inst.sets[i].end());
    if (covered.size() > best.objective) {
      best.objective = covered.size();
      best.selection = chosen;
    }
  }
  return best;
}

struct InstanceShape {
  std::size_t universe = 100;
  std::size_t candidates = 10;
  double density = 0.1;
  double budget = 3;
  bool unit_costs = true;
  bool distinct_locales = true;
  int locale_radius = 0;
};

inline CoverageInstance random_instance(const InstanceShape& s, Rng& rng) {
  CoverageInstance inst;
  inst.universe = s.universe;
  inst.budget = s.budget;
  inst.locale_radius = s.locale_radius;
  for (std::size_t c = 0; c < s.candidates; ++c) {
    VoxelSet set;
    // per-candidate density varies so gains differ
    const double p = s.density * rng.uniform(0.2, 1.8);
    for (VoxelId v = 0; v < s.universe; ++v) {
      if (rng.uniform(0, 1) < p) set.push_back(v);
    }
    inst.sets.push_back(std::move(set));
    inst.costs.push_back(s.unit_costs ? 1.0 : rng.uniform(0.5, 2.0));
    if (s.distinct_locales) {
      inst.cells.push_back({static_cast<int>(c) * (2 * s.locale_radius + 1), 0, 0});
    } else {
      inst.cells.push_back({static_cast<int>(rng.index(4)), static_cast<int>(rng.index(2)), 0});
    }
  }
  return inst;
}

// Pr(all beta targets among n draws without replacement from N) by counting
// n-subsets of {0..N-1} that contain {0..beta-1}.
inline double enumerate_sample_probability(int n, int N, int beta) {
  const std::uint32_t targets = (1u << beta) - 1u;
  std::uint64_t hits = 0, total = 0;
  for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
    if (__builtin_popcount(mask) != n) continue;
    ++total;
    hits += (mask & targets) == targets;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

// Distribution of M, the draw index (1-based) at which the last of beta
// targets appears in a uniformly random order of N items: enumerate target
// position sets, M = largest position.
inline std::vector<double> enumerate_stopping_distribution(int N, int beta) {
  std::vector<double> pmf(N + 1, 0.0);
  std::uint64_t total = 0;
  for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
    if (__builtin_popcount(mask) != beta) continue;
    ++total;
    pmf[32 - __builtin_clz(mask)] += 1.0;
  }
  for (auto& p : pmf) p /= static_cast<double>(total);
  return pmf;
}

}  // namespace camplace::oracle
