#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "replaykit/allocation.hpp"
#include "replaykit/rng.hpp"
#include "replaykit/tensor.hpp"

namespace replaykit {

enum class GroupMode { kByTask, kByClass };

enum class SelectionKind { kRandom, kHerding, kGssGreedy, kGdumbGreedy };

struct SelectionStrategy {
  SelectionKind kind = SelectionKind::kRandom;
  int gss_n_compare = 10;
};

// One stored sample. replica_count > 1 only under a replication policy;
// score is the max-cosine diversity score used by GSS victim selection.
struct BufferEntry {
  TaggedExample example;
  std::size_t replica_count = 1;
  double score = 0.0;
};

double gss_score(const std::vector<double>& candidate_grad,
                 const std::vector<std::vector<double>>& reference_grads);

// Greedy herding order: mu = mean of the pool; step j picks the index
// minimizing ||mu - (sum_chosen + f_cand) / j||, ties toward the lower index.
// Returns the selection order; earlier indices approximate the mean better.
std::vector<std::size_t> herding_select(const std::vector<std::vector<double>>& pool_features,
                                        std::size_t k);

using GradientFn = std::function<std::vector<double>(const TaggedExample&)>;

// Capacity-bounded store of past samples, grouped by task or class.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, GroupMode mode)
      : capacity_(capacity), mode_(mode) {}

  std::size_t capacity() const { return capacity_; }
  GroupMode mode() const { return mode_; }
  int group_key(const TaggedExample& ex) const {
    return mode_ == GroupMode::kByTask ? ex.task_id : ex.label;
  }

  std::size_t stored() const;    // sum of replica counts
  std::size_t distinct() const;  // number of entries
  bool empty() const { return distinct() == 0; }
  std::size_t group_stored(int key) const;
  const std::map<int, std::vector<BufferEntry>>& groups() const { return groups_; }

  // Re-targets group sizes to the plan after a task finished: each group
  // keeps min(quota, available) entries, shrinking per the strategy (random
  // keeps a uniform subset, herding keeps the order prefix); the finished
  // task's pool feeds its own group. Underfill stays empty unless the plan
  // replicates, in which case fill_replication runs afterwards.
  // pool_features (aligned with the pool) is required for herding selection.
  void rebalance_after_task(const AllocationPlan& plan,
                            const std::vector<TaggedExample>& finished_task_pool,
                            const SelectionStrategy& strategy, Rng& rng,
                            const std::vector<std::vector<double>>* pool_features = nullptr);

  // Increments replica counts of random stored entries (preferring groups
  // below quota) until the buffer is exactly full.
  void fill_replication(const AllocationPlan& plan, Rng& rng);

  // k draws with replacement, each entry weighted by its replica count.
  std::vector<TaggedExample> sample_replay_batch(std::size_t k, Rng& rng) const;

  // Greedy gradient-based insertion: while below capacity the candidate is
  // stored with its diversity score; at capacity a victim is drawn with
  // probability proportional to its score and replaced only if the candidate
  // scores lower (i.e. is more diverse).
  void gss_greedy_update(const TaggedExample& candidate, const GradientFn& grad_of,
                         int n_compare, Rng& rng);

  // Greedy balancing insertion: evicts a random entry from a largest bucket
  // (ties toward the lower key) once full, then stores the example.
  void gdumb_insert(const TaggedExample& example, Rng& rng);

  // Inserts without selection logic; used by rebalance and tests.
  void insert(TaggedExample example, double score = 0.0);

  // Line-oriented introspection dump: "group_key sample_id replica_count".
  void dump(std::ostream& out) const;

 private:
  struct FlatRef {
    int key;
    std::size_t index;
  };
  std::vector<FlatRef> flatten() const;
  std::vector<std::vector<double>> sample_stored_gradients(const GradientFn& grad_of,
                                                           int n_compare, Rng& rng) const;

  std::size_t capacity_;
  GroupMode mode_;
  std::map<int, std::vector<BufferEntry>> groups_;
};

}  // namespace replaykit
