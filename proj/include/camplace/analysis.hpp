#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "camplace/error.hpp"

namespace camplace {

struct SampleProbability {
  double exact = 0.0;
  double bound = 0.0;
};

inline constexpr std::uint64_t kLogSpaceThreshold = 1000;

/// Probability that n draws without replacement from N configurations
/// contain all beta optimal ones, with the power lower bound
/// ((n - beta + 1) / N)^beta.
inline SampleProbability prob_optimal_in_sample(std::uint64_t n, std::uint64_t N, std::uint64_t beta) {
  if (N == 0 || n > N || beta > N) throw Error(ErrorCode::kInvalidParams, "require beta <= N, n <= N, N >= 1");
  SampleProbability p;
  if (n < beta) return p;
  if (N > kLogSpaceThreshold) {
    double log_p = 0.0;
    for (std::uint64_t i = 0; i < beta; ++i) {
      log_p += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(N - i));
    }
    p.exact = std::exp(log_p);
  } else {
    p.exact = 1.0;
    for (std::uint64_t i = 0; i < beta; ++i) p.exact *= static_cast<double>(n - i) / static_cast<double>(N - i);
  }
  const double base = static_cast<double>(n + 1) - static_cast<double>(beta);
  p.bound = base <= 0.0 ? 0.0 : std::pow(base / static_cast<double>(N), static_cast<double>(beta));
  // exact >= bound analytically (equal at beta = 1); log-space rounding can
  // leave exact a few ulps under it
  p.exact = std::max(p.exact, p.bound);
  return p;
}

/// Expected draws until all beta targets are seen: beta / (beta + 1) * (N + 1).
inline double expected_samples_to_optimal(std::uint64_t N, std::uint64_t beta) {
  if (beta < 1 || beta > N) throw Error(ErrorCode::kInvalidParams, "require 1 <= beta <= N");
  return static_cast<double>(beta) / static_cast<double>(beta + 1) * static_cast<double>(N + 1);
}

/// Upper bound on |P x D| when directions are resolved to epsilon.
inline double config_space_cardinality_bound(double p_count, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidParams, "epsilon must be > 0");
  if (!(p_count >= 0.0)) throw Error(ErrorCode::kInvalidParams, "position count must be >= 0");
  return p_count * 4.0 * std::numbers::pi / (epsilon * epsilon);
}

}  // namespace camplace
