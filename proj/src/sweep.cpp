#include "replaykit/sweep.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "replaykit/errors.hpp"

namespace replaykit {
namespace {

struct CellTask {
  std::size_t series_idx;
  std::size_t size_idx;
  std::size_t seed_idx;
};

double run_cell(const SweepSeriesSpec& series, const DatasetSpec& dataset, int n_experiences,
                std::size_t memory_size, const AugmentationSpec& augmentation,
                std::uint64_t seed, const Hyperparams& hyper) {
  const auto order = shuffled_class_order(dataset.n_classes, seed);
  const TaskStream stream = make_split_stream(dataset, n_experiences, order, seed);
  const std::uint64_t cell_seed =
      mix_seed(mix_seed(seed, fnv1a(series.label.data(), series.label.size())), memory_size);
  const RunResult result = run_stream(series.strategy, stream, hyper, memory_size, series.policy,
                                      augmentation, cell_seed);
  return average_accuracy(result.matrix);
}

}  // namespace

SweepResult run_sweep(const std::vector<SweepSeriesSpec>& series, const DatasetSpec& dataset,
                      int n_experiences, const std::vector<std::size_t>& memory_sizes,
                      const AugmentationSpec& augmentation,
                      const std::vector<std::uint64_t>& seeds, const Hyperparams& hyper,
                      int jobs) {
  if (series.empty()) throw ConfigError("run_sweep: no series");
  if (seeds.empty()) throw ConfigError("run_sweep: need at least one seed");
  if (memory_sizes.empty()) throw ConfigError("run_sweep: need at least one memory size");
  for (std::size_t i = 1; i < memory_sizes.size(); ++i) {
    if (memory_sizes[i] <= memory_sizes[i - 1])
      throw Error("NonMonotonicX: memory sizes must be strictly increasing");
  }

  std::vector<CellTask> tasks;
  for (std::size_t s = 0; s < series.size(); ++s)
    for (std::size_t m = 0; m < memory_sizes.size(); ++m)
      for (std::size_t r = 0; r < seeds.size(); ++r) tasks.push_back({s, m, r});

  std::vector<double> accuracies(tasks.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      const auto& task = tasks[t];
      accuracies[t] = run_cell(series[task.series_idx], dataset, n_experiences,
                               memory_sizes[task.size_idx], augmentation, seeds[task.seed_idx],
                               hyper);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
      for (;;) {
        const std::size_t t = next.fetch_add(1);
        if (t >= tasks.size()) return;
        try {
          const auto& task = tasks[t];
          accuracies[t] = run_cell(series[task.series_idx], dataset, n_experiences,
                                   memory_sizes[task.size_idx], augmentation,
                                   seeds[task.seed_idx], hyper);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  SweepResult result;
  result.degenerate_std = seeds.size() == 1;
  result.series.resize(series.size());
  std::size_t t = 0;
  for (std::size_t s = 0; s < series.size(); ++s) {
    result.series[s].label = series[s].label;
    for (std::size_t m = 0; m < memory_sizes.size(); ++m) {
      SweepPoint point;
      point.memory_size = memory_sizes[m];
      for (std::size_t r = 0; r < seeds.size(); ++r, ++t) {
        point.per_seed.push_back(accuracies[t]);
        result.cells.push_back(
            {series[s].label, memory_sizes[m], seeds[r], accuracies[t]});
      }
      double sum = 0.0;
      for (double a : point.per_seed) sum += a;
      point.mean = sum / static_cast<double>(point.per_seed.size());
      if (point.per_seed.size() > 1) {
        double ss = 0.0;
        for (double a : point.per_seed) ss += (a - point.mean) * (a - point.mean);
        point.sample_std = std::sqrt(ss / static_cast<double>(point.per_seed.size() - 1));
      }
      result.series[s].points.push_back(std::move(point));
    }
    if (result.series[s].points.size() >= 3) {
      std::vector<CurvePoint> curve;
      for (const auto& p : result.series[s].points) curve.push_back({p.memory_size, p.mean});
      result.series[s].elbow = elbow_point(curve);
    }
  }
  return result;
}

SweepResult run_sweep(const StrategyConfig& strategy, const DatasetSpec& dataset,
                      int n_experiences, const std::vector<std::size_t>& memory_sizes,
                      const WeightingPolicy& policy, const AugmentationSpec& augmentation,
                      const std::vector<std::uint64_t>& seeds, const Hyperparams& hyper,
                      int jobs) {
  return run_sweep({SweepSeriesSpec{to_string(strategy.kind), strategy, policy}}, dataset,
                   n_experiences, memory_sizes, augmentation, seeds, hyper, jobs);
}

}  // namespace replaykit
