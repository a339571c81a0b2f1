#include "replaykit/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "replaykit/errors.hpp"

namespace replaykit {

bool is_replicating(WeightingKind kind) {
  return kind == WeightingKind::kMiddlePlusReplication ||
         kind == WeightingKind::kMiddleLowPlusReplication;
}

const char* to_string(WeightingKind kind) {
  switch (kind) {
    case WeightingKind::kBalanced: return "balanced";
    case WeightingKind::kDecreasing: return "decreasing";
    case WeightingKind::kIncreasing: return "increasing";
    case WeightingKind::kMiddle: return "middle";
    case WeightingKind::kMiddlePlusReplication: return "middle_replication";
    case WeightingKind::kMiddleHigh: return "middle_high";
    case WeightingKind::kMiddleLow: return "middle_low";
    case WeightingKind::kMiddleLowPlusReplication: return "middle_low_replication";
  }
  return "?";
}

WeightingKind weighting_kind_from_string(const std::string& name) {
  for (WeightingKind k :
       {WeightingKind::kBalanced, WeightingKind::kDecreasing, WeightingKind::kIncreasing,
        WeightingKind::kMiddle, WeightingKind::kMiddlePlusReplication, WeightingKind::kMiddleHigh,
        WeightingKind::kMiddleLow, WeightingKind::kMiddleLowPlusReplication}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown weighting policy: " + name);
}

std::vector<double> policy_weights(WeightingKind kind, double factor, int n_tasks) {
  if (n_tasks < 1) throw ConfigError("policy_weights: n_tasks must be >= 1");
  if (kind != WeightingKind::kBalanced && factor <= 1.0)
    throw ConfigError("policy_weights: factor must be > 1");

  const int m = (n_tasks - 1) / 2;  // middle index, 0 = oldest task
  std::vector<double> w(n_tasks);
  for (int i = 0; i < n_tasks; ++i) {
    switch (kind) {
      case WeightingKind::kBalanced:
        w[i] = 1.0;
        break;
      case WeightingKind::kIncreasing:
        w[i] = std::pow(factor, i);
        break;
      case WeightingKind::kDecreasing:
        w[i] = std::pow(factor, n_tasks - 1 - i);
        break;
      case WeightingKind::kMiddle:
      case WeightingKind::kMiddlePlusReplication:
        w[i] = std::pow(factor, -std::abs(i - m));
        break;
      case WeightingKind::kMiddleHigh:
        w[i] = std::pow(factor, -std::min(std::abs(i - m), (n_tasks - 1) - i));
        break;
      case WeightingKind::kMiddleLow:
      case WeightingKind::kMiddleLowPlusReplication:
        w[i] = std::pow(factor, -std::min(std::abs(i - m), i));
        break;
    }
  }
  return w;
}

std::size_t AllocationPlan::quota_sum() const {
  std::size_t total = 0;
  for (const auto& [key, q] : quotas) total += q;
  return total;
}

AllocationPlan compute_allocation(const WeightingPolicy& policy, std::size_t capacity,
                                  int n_tasks) {
  const auto w = policy_weights(policy.kind, policy.factor, n_tasks);
  const double total_w = std::accumulate(w.begin(), w.end(), 0.0);

  AllocationPlan plan;
  plan.capacity = capacity;
  plan.replicate = is_replicating(policy.kind);

  std::vector<std::size_t> quota(n_tasks);
  std::vector<double> frac(n_tasks);
  std::size_t assigned = 0;
  for (int i = 0; i < n_tasks; ++i) {
    const double exact = static_cast<double>(capacity) * w[i] / total_w;
    quota[i] = static_cast<std::size_t>(std::floor(exact));
    frac[i] = exact - static_cast<double>(quota[i]);
    assigned += quota[i];
  }

  std::vector<int> order(n_tasks);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
  const std::size_t remainder = capacity > assigned ? capacity - assigned : 0;
  for (std::size_t r = 0; r < remainder; ++r) ++quota[order[r % order.size()]];

  for (int i = 0; i < n_tasks; ++i) plan.quotas[i] = quota[i];
  return plan;
}

}  // namespace replaykit
