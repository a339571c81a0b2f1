#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "replaykit/augment.hpp"
#include "replaykit/buffer.hpp"
#include "replaykit/metrics.hpp"
#include "replaykit/mlp.hpp"
#include "replaykit/stream.hpp"

namespace replaykit {

enum class StrategyKind { kNaive, kReplay, kGdumb, kICarl, kGss };

const char* to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(const std::string& name);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kReplay;
  double replay_ratio = 1.0;  // replayed samples per current sample, per step
  int gdumb_epochs = 0;       // 0 means reuse the stream hyperparameter epochs
  int gss_n_compare = 10;
  SelectionKind replay_selection = SelectionKind::kRandom;

  // Test/diagnostic hook, called once per optimization step with the number
  // of current and replayed samples in the batch.
  std::function<void(std::size_t, std::size_t)> batch_observer;

  bool operator==(const StrategyConfig& o) const {
    return kind == o.kind && replay_ratio == o.replay_ratio && gdumb_epochs == o.gdumb_epochs &&
           gss_n_compare == o.gss_n_compare && replay_selection == o.replay_selection;
  }
};

// Drives one strategy over a stream: owns the model, the buffer and the run's
// RNG. Experiences must be fed in stream order.
class StrategyRunner {
 public:
  StrategyRunner(StrategyConfig config, MlpConfig model_config, Hyperparams hyper,
                 WeightingPolicy policy, AugmentationSpec augmentation, std::size_t capacity,
                 std::uint64_t seed);

  void train_experience(const Experience& exp);

  std::vector<int> predict(const Matrix& batch) const;
  double evaluate(const std::vector<TaggedExample>& test_set) const;

  const Mlp& model() const { return model_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const std::optional<Mlp>& last_snapshot() const { return snapshot_; }

 private:
  void train_naive(const Experience& exp);
  void train_replay(const Experience& exp);
  void train_gdumb(const Experience& exp);
  void train_icarl(const Experience& exp);
  void train_gss(const Experience& exp);

  std::vector<TaggedExample> assemble_batch(const std::vector<TaggedExample>& data,
                                            const std::vector<std::size_t>& order,
                                            std::size_t begin, std::size_t end);
  void cross_entropy_step(const std::vector<TaggedExample>& batch);

  StrategyConfig config_;
  Hyperparams hyper_;
  WeightingPolicy policy_;
  AugmentationSpec augmentation_;
  std::size_t capacity_;
  std::uint64_t run_seed_;
  Rng rng_;
  Mlp model_;
  ReplayBuffer buffer_;
  std::vector<int> seen_classes_;
  std::optional<Mlp> snapshot_;
};

struct RunResult {
  AccuracyMatrix matrix;
  Mlp final_model;
};

// Trains the stream's experiences in order; row i of the matrix holds the
// accuracy on every experience's test set after training experience i.
// Fully deterministic per seed.
RunResult run_stream(const StrategyConfig& config, const TaskStream& stream,
                     const Hyperparams& hyper, std::size_t capacity,
                     const WeightingPolicy& policy, const AugmentationSpec& augmentation,
                     std::uint64_t seed);

}  // namespace replaykit
