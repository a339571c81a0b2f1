#include "replaykit/buffer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "replaykit/errors.hpp"

namespace replaykit {

double gss_score(const std::vector<double>& candidate_grad,
                 const std::vector<std::vector<double>>& reference_grads) {
  double cand_norm2 = 0.0;
  for (double v : candidate_grad) cand_norm2 += v * v;
  if (cand_norm2 == 0.0) return 0.0;  // zero gradient: maximally replaceable
  if (reference_grads.empty()) return 0.0;

  double best = -1.0;
  for (const auto& ref : reference_grads) {
    if (ref.size() != candidate_grad.size())
      throw ConfigError("gss_score: gradient length mismatch");
    double dot = 0.0, ref_norm2 = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      dot += candidate_grad[i] * ref[i];
      ref_norm2 += ref[i] * ref[i];
    }
    const double sim = ref_norm2 == 0.0 ? 0.0 : dot / std::sqrt(cand_norm2 * ref_norm2);
    best = std::max(best, sim);
  }
  return best;
}

std::vector<std::size_t> herding_select(const std::vector<std::vector<double>>& pool_features,
                                        std::size_t k) {
  if (pool_features.empty()) throw Error("EmptyPool: herding_select on empty pool");
  if (k < 1 || k > pool_features.size())
    throw ConfigError("herding_select: k must be in [1, pool size]");

  const std::size_t n = pool_features.size();
  const std::size_t d = pool_features.front().size();
  for (const auto& f : pool_features)
    if (f.size() != d) throw ConfigError("herding_select: feature length mismatch");

  std::vector<double> mu(d, 0.0);
  for (const auto& f : pool_features)
    for (std::size_t i = 0; i < d; ++i) mu[i] += f[i];
  for (auto& v : mu) v /= static_cast<double>(n);

  std::vector<std::size_t> order;
  order.reserve(k);
  std::vector<bool> chosen(n, false);
  std::vector<double> sum(d, 0.0);
  for (std::size_t step = 1; step <= k; ++step) {
    double best_obj = 0.0;
    std::size_t best_idx = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      double obj = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = mu[j] - (sum[j] + pool_features[i][j]) / static_cast<double>(step);
        obj += diff * diff;
      }
      if (best_idx == n || obj < best_obj) {
        best_obj = obj;
        best_idx = i;
      }
    }
    chosen[best_idx] = true;
    for (std::size_t j = 0; j < d; ++j) sum[j] += pool_features[best_idx][j];
    order.push_back(best_idx);
  }
  return order;
}

std::size_t ReplayBuffer::stored() const {
  std::size_t total = 0;
  for (const auto& [key, entries] : groups_)
    for (const auto& e : entries) total += e.replica_count;
  return total;
}

std::size_t ReplayBuffer::distinct() const {
  std::size_t total = 0;
  for (const auto& [key, entries] : groups_) total += entries.size();
  return total;
}

std::size_t ReplayBuffer::group_stored(int key) const {
  auto it = groups_.find(key);
  if (it == groups_.end()) return 0;
  std::size_t total = 0;
  for (const auto& e : it->second) total += e.replica_count;
  return total;
}

void ReplayBuffer::insert(TaggedExample example, double score) {
  if (stored() + 1 > capacity_) throw Error("ReplayBuffer: insert would exceed capacity");
  const int key = group_key(example);
  groups_[key].push_back(BufferEntry{std::move(example), 1, score});
}

std::vector<ReplayBuffer::FlatRef> ReplayBuffer::flatten() const {
  std::vector<FlatRef> refs;
  for (const auto& [key, entries] : groups_)
    for (std::size_t i = 0; i < entries.size(); ++i) refs.push_back({key, i});
  return refs;
}

void ReplayBuffer::rebalance_after_task(const AllocationPlan& plan,
                                        const std::vector<TaggedExample>& finished_task_pool,
                                        const SelectionStrategy& strategy, Rng& rng,
                                        const std::vector<std::vector<double>>* pool_features) {
  for (const auto& [key, entries] : groups_) {
    if (!plan.quotas.count(key))
      throw Error("PlanTaskMismatch: stored group " + std::to_string(key) + " not in plan");
  }
  std::map<int, std::vector<std::size_t>> pool_by_key;
  for (std::size_t i = 0; i < finished_task_pool.size(); ++i) {
    const int key = group_key(finished_task_pool[i]);
    if (!plan.quotas.count(key))
      throw Error("PlanTaskMismatch: pool group " + std::to_string(key) + " not in plan");
    pool_by_key[key].push_back(i);
  }
  if (strategy.kind == SelectionKind::kHerding && !pool_by_key.empty() && pool_features == nullptr)
    throw ConfigError("rebalance_after_task: herding selection needs pool features");

  // Replica counts are re-derived on every rebalance; only distinct samples
  // count as available.
  for (auto& [key, entries] : groups_)
    for (auto& e : entries) e.replica_count = 1;

  for (const auto& [key, quota] : plan.quotas) {
    auto& entries = groups_[key];
    if (entries.size() > quota) {
      // shrink
      if (strategy.kind == SelectionKind::kHerding) {
        entries.resize(quota);  // herding order prefix
      } else {
        std::vector<bool> keep(entries.size(), false);
        for (std::size_t i : rng.sample_indices(entries.size(), quota)) keep[i] = true;
        std::vector<BufferEntry> kept;
        kept.reserve(quota);
        for (std::size_t i = 0; i < entries.size(); ++i)
          if (keep[i]) kept.push_back(std::move(entries[i]));
        entries = std::move(kept);
      }
    } else if (entries.size() < quota) {
      // grow from the finished task's pool; past tasks have no pool and keep
      // their shortfall
      auto it = pool_by_key.find(key);
      if (it != pool_by_key.end()) {
        const auto& members = it->second;
        const std::size_t take = std::min(quota - entries.size(), members.size());
        if (strategy.kind == SelectionKind::kHerding) {
          std::vector<std::vector<double>> feats;
          feats.reserve(members.size());
          for (std::size_t i : members) feats.push_back((*pool_features)[i]);
          for (std::size_t j : herding_select(feats, take))
            entries.push_back(BufferEntry{finished_task_pool[members[j]], 1, 0.0});
        } else {
          for (std::size_t j : rng.sample_indices(members.size(), take))
            entries.push_back(BufferEntry{finished_task_pool[members[j]], 1, 0.0});
        }
      }
    }
    if (entries.empty()) groups_.erase(key);
  }

  if (plan.replicate && distinct() > 0 && stored() < capacity_) fill_replication(plan, rng);
}

void ReplayBuffer::fill_replication(const AllocationPlan& plan, Rng& rng) {
  if (stored() >= capacity_) return;
  if (distinct() == 0) throw Error("EmptyBuffer: nothing to replicate");

  while (stored() < capacity_) {
    // entries in groups still below quota are preferred replication targets
    std::vector<FlatRef> eligible;
    for (const auto& [key, entries] : groups_) {
      auto it = plan.quotas.find(key);
      const std::size_t quota = it == plan.quotas.end() ? 0 : it->second;
      if (group_stored(key) < quota)
        for (std::size_t i = 0; i < entries.size(); ++i) eligible.push_back({key, i});
    }
    if (eligible.empty()) eligible = flatten();
    const auto& pick = eligible[rng.bounded(eligible.size())];
    ++groups_[pick.key][pick.index].replica_count;
  }
}

std::vector<TaggedExample> ReplayBuffer::sample_replay_batch(std::size_t k, Rng& rng) const {
  if (empty()) throw Error("EmptyBuffer: cannot sample from an empty buffer");
  if (k < 1) throw ConfigError("sample_replay_batch: k must be >= 1");

  std::vector<const BufferEntry*> entries;
  std::vector<std::size_t> cumulative;
  std::size_t total = 0;
  for (const auto& [key, group] : groups_) {
    for (const auto& e : group) {
      entries.push_back(&e);
      total += e.replica_count;
      cumulative.push_back(total);
    }
  }

  std::vector<TaggedExample> batch;
  batch.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t r = rng.bounded(total);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    batch.push_back(entries[it - cumulative.begin()]->example);
  }
  return batch;
}

std::vector<std::vector<double>> ReplayBuffer::sample_stored_gradients(const GradientFn& grad_of,
                                                                       int n_compare,
                                                                       Rng& rng) const {
  const auto refs = flatten();
  const std::size_t m = std::min<std::size_t>(n_compare, refs.size());
  std::vector<std::vector<double>> grads;
  grads.reserve(m);
  for (std::size_t i : rng.sample_indices(refs.size(), m)) {
    const auto& [key, index] = refs[i];
    grads.push_back(grad_of(groups_.at(key)[index].example));
  }
  return grads;
}

void ReplayBuffer::gss_greedy_update(const TaggedExample& candidate, const GradientFn& grad_of,
                                     int n_compare, Rng& rng) {
  if (n_compare < 1) throw ConfigError("gss_greedy_update: n_compare must be >= 1");
  if (capacity_ == 0) return;

  if (stored() < capacity_) {
    const auto refs = sample_stored_gradients(grad_of, n_compare, rng);
    insert(candidate, gss_score(grad_of(candidate), refs));
    return;
  }

  // Victim drawn proportionally to its score; negative scores carry no mass,
  // and all-zero mass falls back to uniform.
  const auto flat = flatten();
  std::vector<double> mass(flat.size());
  double total = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    mass[i] = std::max(groups_.at(flat[i].key)[flat[i].index].score, 0.0);
    total += mass[i];
  }
  std::size_t victim = 0;
  if (total <= 0.0) {
    victim = rng.bounded(flat.size());
  } else {
    const double r = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      acc += mass[i];
      victim = i;
      if (r < acc) break;
    }
  }

  const double victim_score = groups_.at(flat[victim].key)[flat[victim].index].score;
  const auto refs = sample_stored_gradients(grad_of, n_compare, rng);
  const double candidate_score = gss_score(grad_of(candidate), refs);
  if (candidate_score < victim_score) {
    auto& entries = groups_[flat[victim].key];
    entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(flat[victim].index));
    if (entries.empty()) groups_.erase(flat[victim].key);
    insert(candidate, candidate_score);
  }
}

void ReplayBuffer::gdumb_insert(const TaggedExample& example, Rng& rng) {
  if (capacity_ == 0) return;
  const int key = group_key(example);
  groups_.try_emplace(key);  // a new class opens its bucket before eviction

  if (stored() >= capacity_) {
    int largest = key;
    std::size_t largest_size = 0;
    for (const auto& [k, entries] : groups_) {
      if (entries.size() > largest_size) {  // ties toward the lower key
        largest = k;
        largest_size = entries.size();
      }
    }
    auto& bucket = groups_[largest];
    bucket.erase(bucket.begin() + static_cast<std::ptrdiff_t>(rng.bounded(bucket.size())));
  }
  groups_[key].push_back(BufferEntry{example, 1, 0.0});
}

void ReplayBuffer::dump(std::ostream& out) const {
  for (const auto& [key, entries] : groups_)
    for (const auto& e : entries)
      out << key << ' ' << e.example.sample_id << ' ' << e.replica_count << '\n';
}

}  // namespace replaykit
