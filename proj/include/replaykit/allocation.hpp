#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace replaykit {

// How buffer capacity is distributed over past tasks. Task index 0 is the
// oldest task; "low distance" means the most recent one.
enum class WeightingKind {
  kBalanced,
  kDecreasing,
  kIncreasing,
  kMiddle,
  kMiddlePlusReplication,
  kMiddleHigh,
  kMiddleLow,
  kMiddleLowPlusReplication,
};

struct WeightingPolicy {
  WeightingKind kind = WeightingKind::kBalanced;
  double factor = 3.0;  // > 1 for every kind except kBalanced (ignored there)

  bool operator==(const WeightingPolicy&) const = default;
};

bool is_replicating(WeightingKind kind);
const char* to_string(WeightingKind kind);
WeightingKind weighting_kind_from_string(const std::string& name);

// Relative share of each task, length n_tasks.
//   Increasing:  factor^i          Decreasing: factor^(n-1-i)     Balanced: 1
//   with middle index m = floor((n-1)/2):
//   Middle(+repl.):    factor^-|i-m|
//   MiddleHigh:        factor^-min(|i-m|, (n-1)-i)   (peaks at middle and newest)
//   MiddleLow(+repl.): factor^-min(|i-m|, i)         (peaks at middle and oldest)
std::vector<double> policy_weights(WeightingKind kind, double factor, int n_tasks);

// Per-group sample quotas; group keys are task ids (or class ids when a
// caller builds a plan by hand).
struct AllocationPlan {
  std::map<int, std::size_t> quotas;
  std::size_t capacity = 0;
  bool replicate = false;  // fill leftover slots by replicating stored samples

  std::size_t quota_sum() const;
};

// Largest-remainder apportionment of `capacity` over policy weights:
// q_i = floor(capacity * w_i / sum(w)), leftover slots go to the largest
// fractional parts, ties broken toward the lower task index.
AllocationPlan compute_allocation(const WeightingPolicy& policy, std::size_t capacity,
                                  int n_tasks);

}  // namespace replaykit
