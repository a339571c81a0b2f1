#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "replaykit/metrics.hpp"
#include "replaykit/strategy.hpp"
#include "replaykit/stream.hpp"

namespace replaykit {

// One curve of the sweep: a strategy (optionally paired with a weighting
// policy) evaluated across all memory sizes.
struct SweepSeriesSpec {
  std::string label;
  StrategyConfig strategy;
  WeightingPolicy policy;
};

struct SweepPoint {
  std::size_t memory_size = 0;
  double mean = 0.0;
  double sample_std = 0.0;  // n-1 denominator; 0 for a single seed
  std::vector<double> per_seed;
};

struct SweepSeries {
  std::string label;
  std::vector<SweepPoint> points;
  std::optional<ElbowResult> elbow;  // absent for curves of fewer than 3 sizes
};

struct SweepCell {
  std::string series;
  std::size_t memory_size = 0;
  std::uint64_t seed = 0;
  double avg_accuracy = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // sorted by (series, memory size, seed order)
  std::vector<SweepSeries> series;
  bool degenerate_std = false;  // flagged when only one seed was given
};

// Runs every (series, memory_size, seed) cell independently and aggregates
// mean / sample std of the final average accuracy. Each seed rebuilds the
// stream with a reshuffled class order; cell RNGs are derived from
// (seed, series label, memory size) so cells can run on a worker pool
// without affecting determinism.
SweepResult run_sweep(const std::vector<SweepSeriesSpec>& series, const DatasetSpec& dataset,
                      int n_experiences, const std::vector<std::size_t>& memory_sizes,
                      const AugmentationSpec& augmentation,
                      const std::vector<std::uint64_t>& seeds, const Hyperparams& hyper,
                      int jobs = 1);

// Single-series convenience overload.
SweepResult run_sweep(const StrategyConfig& strategy, const DatasetSpec& dataset,
                      int n_experiences, const std::vector<std::size_t>& memory_sizes,
                      const WeightingPolicy& policy, const AugmentationSpec& augmentation,
                      const std::vector<std::uint64_t>& seeds, const Hyperparams& hyper,
                      int jobs = 1);

}  // namespace replaykit
