#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "camplace/bitset.hpp"
#include "camplace/error.hpp"
#include "camplace/visibility.hpp"
#include "camplace/voxel_grid.hpp"

namespace camplace {

/// Budgeted maximum-coverage instance over sampled configurations.
///
/// Candidate i costs costs[i] and sees sets[i]. Two candidates share a
/// locale, and so cannot both be selected, when the Chebyshev distance of
/// their position cells is at most locale_radius (0: same voxel).
struct CoverageInstance {
  std::size_t universe = 0;
  std::vector<VoxelSet> sets;
  std::vector<double> costs;
  std::vector<Cell> cells;
  double budget = 0.0;
  int locale_radius = 0;

  std::size_t size() const { return sets.size(); }

  bool conflicts(std::size_t a, std::size_t b) const {
    return chebyshev(cells[a], cells[b]) <= locale_radius;
  }

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidParams, what); };
    if (!(budget >= 0.0)) fail("budget must be >= 0");
    if (costs.size() != sets.size() || cells.size() != sets.size()) fail("candidate arrays differ in length");
    if (locale_radius < 0) fail("locale radius must be >= 0");
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (!(costs[i] > 0.0)) fail("candidate costs must be > 0");
      for (std::size_t k = 0; k < sets[i].size(); ++k) {
        if (sets[i][k] >= universe) fail("voxel id outside the free set");
        if (k > 0 && sets[i][k] <= sets[i][k - 1]) fail("voxel sets must be sorted and unique");
      }
    }
  }

  /// Voxel -> candidates that see it.
  InvertedVisibility inverted() const {
    std::vector<std::pair<std::size_t, VoxelSet>> views;
    views.reserve(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) views.emplace_back(i, sets[i]);
    return invert_visibility(views);
  }
};

enum class Optimality { kProven, kIncumbent, kHeuristic };

inline const char* to_string(Optimality o) {
  switch (o) {
    case Optimality::kProven: return "proven";
    case Optimality::kIncumbent: return "incumbent";
    case Optimality::kHeuristic: return "heuristic";
  }
  return "?";
}

struct Solution {
  std::vector<std::size_t> selected;  // ascending candidate indices
  std::size_t objective = 0;
  VoxelSet covered;
  Optimality status = Optimality::kIncumbent;
  double solve_seconds = 0.0;
  std::uint64_t nodes = 0;
};

inline constexpr double kBudgetSlack = 1e-9;

/// Empty string when `selected` is a feasible network for the instance.
inline std::string feasibility_error(const CoverageInstance& inst, const std::vector<std::size_t>& selected) {
  double spent = 0.0;
  for (std::size_t a = 0; a < selected.size(); ++a) {
    if (selected[a] >= inst.size()) return "candidate index out of range";
    spent += inst.costs[selected[a]];
    for (std::size_t b = 0; b < a; ++b) {
      if (selected[a] == selected[b]) return "candidate selected twice";
      if (inst.conflicts(selected[a], selected[b])) return "two cameras in one locale";
    }
  }
  if (spent > inst.budget + kBudgetSlack) return "cost exceeds budget";
  return {};
}

inline VoxelSet union_of(const CoverageInstance& inst, const std::vector<std::size_t>& selected) {
  VoxelBits bits(inst.universe);
  for (auto c : selected) {
    for (auto v : inst.sets[c]) bits.set(v);
  }
  return bits.ids();
}

namespace detail {

inline Solution make_solution(const CoverageInstance& inst, std::vector<std::size_t> selected, Optimality status) {
  Solution s;
  std::sort(selected.begin(), selected.end());
  s.selected = std::move(selected);
  s.covered = union_of(inst, s.selected);
  s.objective = s.covered.size();
  s.status = status;
  return s;
}

inline std::vector<VoxelBits> to_bits(const CoverageInstance& inst) {
  std::vector<VoxelBits> bits;
  bits.reserve(inst.size());
  for (const auto& s : inst.sets) bits.push_back(VoxelBits::from_ids(inst.universe, s));
  return bits;
}

}  // namespace detail

/// Greedy heuristic: repeatedly take the affordable candidate with the best
/// marginal gain per unit cost (ties to the lowest index), then drop its
/// locale. Stops when nothing affordable adds coverage.
inline Solution solve_greedy(const CoverageInstance& inst) {
  inst.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto bits = detail::to_bits(inst);
  VoxelBits covered(inst.universe);
  std::vector<std::uint8_t> alive(inst.size(), 1);
  std::vector<std::size_t> chosen;
  double left = inst.budget;
  for (;;) {
    std::optional<std::size_t> best;
    double best_ratio = 0.0;
    for (std::size_t c = 0; c < inst.size(); ++c) {
      if (!alive[c] || inst.costs[c] > left + kBudgetSlack) continue;
      const std::size_t gain = covered.count_new(bits[c]);
      const double ratio = static_cast<double>(gain) / inst.costs[c];
      if (gain > 0 && (!best || ratio > best_ratio)) {
        best = c;
        best_ratio = ratio;
      }
    }
    if (!best) break;
    chosen.push_back(*best);
    covered |= bits[*best];
    left -= inst.costs[*best];
    for (std::size_t c = 0; c < inst.size(); ++c) {
      if (alive[c] && inst.conflicts(c, *best)) alive[c] = 0;
    }
  }
  Solution s = detail::make_solution(inst, std::move(chosen), Optimality::kHeuristic);
  s.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

struct SolveLimits {
  std::optional<double> time_limit_seconds;
  std::optional<std::uint64_t> node_limit;
};

namespace detail {

class BranchAndBound {
 public:
  BranchAndBound(const CoverageInstance& inst, SolveLimits limits)
      : inst_(inst), bits_(to_bits(inst)), limits_(limits), start_(std::chrono::steady_clock::now()) {}

  void seed_incumbent(const std::vector<std::size_t>& selected, std::size_t objective) {
    if (!have_incumbent_ || objective > best_) {
      best_ = objective;
      best_selection_ = selected;
      have_incumbent_ = true;
    }
  }

  void run() {
    std::vector<std::uint32_t> alive;
    for (std::size_t c = 0; c < inst_.size(); ++c) {
      if (inst_.costs[c] <= inst_.budget + kBudgetSlack) alive.push_back(static_cast<std::uint32_t>(c));
    }
    std::vector<std::size_t> chosen;
    search(VoxelBits(inst_.universe), 0, inst_.budget, alive, chosen);
  }

  bool aborted() const { return aborted_; }
  std::uint64_t nodes() const { return nodes_; }
  const std::vector<std::size_t>& best_selection() const { return best_selection_; }

 private:
  struct Item {
    std::size_t gain;
    std::uint32_t index;
    double ratio;
  };

  bool out_of_budget() {
    if (limits_.node_limit && nodes_ > *limits_.node_limit) return true;
    if (limits_.time_limit_seconds && (nodes_ & 63) == 0) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (elapsed > *limits_.time_limit_seconds) return true;
    }
    return false;
  }

  // Fractional knapsack over items[from..] (sorted by ratio) with capacity
  // `left`: an upper bound on the coverage still obtainable, since marginal
  // gains only shrink as more cameras are added.
  double fill_bound(const std::vector<Item>& items, std::size_t from, double left) const {
    double bound = 0.0;
    for (std::size_t j = from; j < items.size() && left > kBudgetSlack; ++j) {
      const double cost = inst_.costs[items[j].index];
      if (cost <= left + kBudgetSlack) {
        bound += static_cast<double>(items[j].gain);
        left -= cost;
      } else {
        bound += items[j].ratio * left;
        left = 0.0;
      }
    }
    return bound;
  }

  void search(const VoxelBits& covered, std::size_t covered_count, double left,
              const std::vector<std::uint32_t>& alive, std::vector<std::size_t>& chosen) {
    ++nodes_;
    if (out_of_budget()) {
      aborted_ = true;
      return;
    }
    std::vector<Item> items;
    items.reserve(alive.size());
    for (auto c : alive) {
      if (inst_.costs[c] > left + kBudgetSlack) continue;
      const std::size_t gain = covered.count_new(bits_[c]);
      if (gain > 0) items.push_back({gain, c, static_cast<double>(gain) / inst_.costs[c]});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      if (a.ratio != b.ratio) return a.ratio > b.ratio;
      return a.index < b.index;
    });

    for (std::size_t i = 0; i < items.size(); ++i) {
      const double bound = static_cast<double>(covered_count) + fill_bound(items, i, left);
      if (have_incumbent_ && bound < static_cast<double>(best_) + 1.0 - 1e-9) break;
      const auto c = items[i].index;
      VoxelBits next = covered;
      next |= bits_[c];
      const std::size_t next_count = covered_count + items[i].gain;
      chosen.push_back(c);
      if (!have_incumbent_ || next_count > best_) {
        best_ = next_count;
        best_selection_ = chosen;
        have_incumbent_ = true;
      }
      const double next_left = left - inst_.costs[c];
      std::vector<std::uint32_t> child;
      for (std::size_t j = i + 1; j < items.size(); ++j) {
        const auto d = items[j].index;
        if (inst_.costs[d] <= next_left + kBudgetSlack && !inst_.conflicts(c, d)) child.push_back(d);
      }
      if (!child.empty()) search(next, next_count, next_left, child, chosen);
      chosen.pop_back();
      if (aborted_) return;
    }
  }

  const CoverageInstance& inst_;
  std::vector<VoxelBits> bits_;
  SolveLimits limits_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  bool have_incumbent_ = false;
  std::size_t best_ = 0;
  std::vector<std::size_t> best_selection_;
};

}  // namespace detail

/// Exact solver (depth-first branch and bound).
///
/// Branches on candidates in order of marginal gain per cost: the i-th
/// child takes candidate i and excludes every better-ranked one, so the
/// children partition the search space. The bound is the fractional
/// knapsack of marginal gains over the remaining budget; locale constraints
/// are relaxed in the bound. The incumbent starts at the better of the warm
/// start and the greedy solution, so the result never falls below the warm
/// start even when a limit stops the search early (status kIncumbent).
inline Solution solve_exact(const CoverageInstance& inst, const Solution* warm_start = nullptr,
                            SolveLimits limits = {}) {
  inst.validate();
  const auto t0 = std::chrono::steady_clock::now();
  if (warm_start) {
    if (auto err = feasibility_error(inst, warm_start->selected); !err.empty()) {
      throw Error(ErrorCode::kInfeasibleWarmStart, err);
    }
  }
  detail::BranchAndBound bnb(inst, limits);
  if (warm_start) {
    bnb.seed_incumbent(warm_start->selected, union_of(inst, warm_start->selected).size());
  }
  const Solution greedy = solve_greedy(inst);
  bnb.seed_incumbent(greedy.selected, greedy.objective);
  bnb.run();

  Solution s = detail::make_solution(inst, bnb.best_selection(),
                                     bnb.aborted() ? Optimality::kIncumbent : Optimality::kProven);
  s.nodes = bnb.nodes();
  s.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

struct CameraCoverage {
  std::size_t candidate = 0;
  std::size_t covered = 0;
  double share = 0.0;  // covered / network coverage
  std::size_t overcovered = 0;
};

struct CoverageReport {
  std::vector<CameraCoverage> cameras;
  std::size_t network_coverage = 0;
  std::size_t covered_more_than_once = 0;
};

/// Per-camera coverage and overlap with the rest of the network.
inline CoverageReport coverage_metrics(const Solution& sol, const CoverageInstance& inst) {
  std::map<VoxelId, std::size_t> multiplicity;
  for (auto c : sol.selected) {
    for (auto v : inst.sets[c]) ++multiplicity[v];
  }
  CoverageReport r;
  r.network_coverage = multiplicity.size();
  for (const auto& [v, m] : multiplicity) {
    if (m >= 2) ++r.covered_more_than_once;
  }
  for (auto c : sol.selected) {
    CameraCoverage cc;
    cc.candidate = c;
    cc.covered = inst.sets[c].size();
    cc.share = r.network_coverage ? static_cast<double>(cc.covered) / r.network_coverage : 0.0;
    for (auto v : inst.sets[c]) {
      if (multiplicity[v] >= 2) ++cc.overcovered;
    }
    r.cameras.push_back(cc);
  }
  return r;
}

}  // namespace camplace
