#include "replaykit/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "replaykit/errors.hpp"
#include "replaykit/losses.hpp"

namespace replaykit {
namespace {

GroupMode buffer_mode(StrategyKind kind) {
  return kind == StrategyKind::kGdumb || kind == StrategyKind::kICarl ? GroupMode::kByClass
                                                                      : GroupMode::kByTask;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx);
  return idx;
}

std::vector<std::vector<double>> feature_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows[r].resize(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
  }
  return rows;
}

}  // namespace

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kNaive: return "naive";
    case StrategyKind::kReplay: return "replay";
    case StrategyKind::kGdumb: return "gdumb";
    case StrategyKind::kICarl: return "icarl";
    case StrategyKind::kGss: return "gss";
  }
  return "?";
}

StrategyKind strategy_kind_from_string(const std::string& name) {
  for (StrategyKind k : {StrategyKind::kNaive, StrategyKind::kReplay, StrategyKind::kGdumb,
                         StrategyKind::kICarl, StrategyKind::kGss}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown strategy: " + name);
}

StrategyRunner::StrategyRunner(StrategyConfig config, MlpConfig model_config, Hyperparams hyper,
                               WeightingPolicy policy, AugmentationSpec augmentation,
                               std::size_t capacity, std::uint64_t seed)
    : config_(std::move(config)),
      hyper_(hyper),
      policy_(policy),
      augmentation_(augmentation),
      capacity_(capacity),
      run_seed_(seed),
      rng_(mix_seed(seed, fnv1a("run", 3))),
      model_(model_config, seed),
      buffer_(capacity, buffer_mode(config_.kind)) {
  if (config_.gss_n_compare < 1) throw ConfigError("gss_n_compare must be >= 1");
  if (config_.replay_ratio < 0.0) throw ConfigError("replay_ratio must be >= 0");
  if (config_.gdumb_epochs < 0) throw ConfigError("gdumb_epochs must be >= 0");
  if (hyper_.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (hyper_.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (hyper_.learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
  if (hyper_.momentum < 0.0 || hyper_.momentum >= 1.0)
    throw ConfigError("momentum must be in [0, 1)");
}

std::vector<TaggedExample> StrategyRunner::assemble_batch(const std::vector<TaggedExample>& data,
                                                          const std::vector<std::size_t>& order,
                                                          std::size_t begin, std::size_t end) {
  std::vector<TaggedExample> batch;
  batch.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) batch.push_back(data[order[i]]);
  return batch;
}

void StrategyRunner::cross_entropy_step(const std::vector<TaggedExample>& batch) {
  ForwardCache cache;
  model_.forward(stack_features(batch), &cache);
  const LossGrad lg = cross_entropy_loss_and_grad(cache.logits, stack_labels(batch));
  model_.sgd_step(model_.backward(cache, lg.dlogits), hyper_);
}

void StrategyRunner::train_naive(const Experience& exp) {
  for (int epoch = 0; epoch < hyper_.epochs; ++epoch) {
    const auto order = shuffled_indices(exp.train.size(), rng_);
    for (std::size_t b = 0; b < order.size(); b += hyper_.batch_size) {
      const std::size_t e = std::min(order.size(), b + hyper_.batch_size);
      auto batch = assemble_batch(exp.train, order, b, e);
      if (config_.batch_observer) config_.batch_observer(batch.size(), 0);
      cross_entropy_step(batch);
    }
  }
}

void StrategyRunner::train_replay(const Experience& exp) {
  const bool augment_stream =
      augmentation_.enabled() && augmentation_.apply_to == ApplyTo::kBufferAndStream;
  for (int epoch = 0; epoch < hyper_.epochs; ++epoch) {
    const auto order = shuffled_indices(exp.train.size(), rng_);
    for (std::size_t b = 0; b < order.size(); b += hyper_.batch_size) {
      const std::size_t e = std::min(order.size(), b + hyper_.batch_size);
      auto batch = assemble_batch(exp.train, order, b, e);
      const std::size_t n_current = batch.size();
      if (augment_stream)
        for (std::size_t i = 0; i < n_current; ++i) batch[i] = augment(batch[i], augmentation_, rng_);

      std::size_t n_replay = 0;
      if (!buffer_.empty()) {
        n_replay = static_cast<std::size_t>(
            std::lround(config_.replay_ratio * static_cast<double>(n_current)));
        if (n_replay > 0) {
          for (auto& ex : buffer_.sample_replay_batch(n_replay, rng_)) {
            batch.push_back(augmentation_.enabled() ? augment(ex, augmentation_, rng_)
                                                    : std::move(ex));
          }
        }
      }
      if (config_.batch_observer) config_.batch_observer(n_current, n_replay);
      cross_entropy_step(batch);
    }
  }
  if (capacity_ > 0) {
    const AllocationPlan plan = compute_allocation(policy_, capacity_, exp.task_id + 1);
    SelectionStrategy selection{config_.replay_selection, config_.gss_n_compare};
    if (selection.kind == SelectionKind::kHerding) {
      const auto feats = feature_rows(model_.extract_features(stack_features(exp.train)));
      buffer_.rebalance_after_task(plan, exp.train, selection, rng_, &feats);
    } else {
      buffer_.rebalance_after_task(plan, exp.train, selection, rng_);
    }
  }
}

void StrategyRunner::train_gdumb(const Experience& exp) {
  for (const auto& ex : exp.train) buffer_.gdumb_insert(ex, rng_);

  // dumb learner: fresh model, trained on buffer contents only, with a
  // retraining RNG derived from the run seed so the result depends only on
  // (buffer contents, seed)
  model_.reinitialize(run_seed_);
  std::vector<TaggedExample> data;
  for (const auto& [key, entries] : buffer_.groups())
    for (const auto& entry : entries) data.push_back(entry.example);
  if (data.empty()) return;

  Rng retrain_rng(mix_seed(run_seed_, fnv1a("gdumb-retrain", 13)));
  const int epochs = config_.gdumb_epochs > 0 ? config_.gdumb_epochs : hyper_.epochs;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const auto order = shuffled_indices(data.size(), retrain_rng);
    for (std::size_t b = 0; b < order.size(); b += hyper_.batch_size) {
      const std::size_t e = std::min(order.size(), b + hyper_.batch_size);
      auto batch = assemble_batch(data, order, b, e);
      if (augmentation_.enabled())  // buffer samples are memory samples
        for (auto& ex : batch) ex = augment(ex, augmentation_, retrain_rng);
      if (config_.batch_observer) config_.batch_observer(0, batch.size());
      cross_entropy_step(batch);
    }
  }
}

void StrategyRunner::train_icarl(const Experience& exp) {
  snapshot_ = model_;
  const std::vector<int> old_classes = seen_classes_;
  const std::vector<int>& new_classes = exp.classes;
  const bool augment_stream =
      augmentation_.enabled() && augmentation_.apply_to == ApplyTo::kBufferAndStream;

  for (int epoch = 0; epoch < hyper_.epochs; ++epoch) {
    const auto order = shuffled_indices(exp.train.size(), rng_);
    for (std::size_t b = 0; b < order.size(); b += hyper_.batch_size) {
      const std::size_t e = std::min(order.size(), b + hyper_.batch_size);
      auto batch = assemble_batch(exp.train, order, b, e);
      const std::size_t n_current = batch.size();
      if (augment_stream)
        for (std::size_t i = 0; i < n_current; ++i) batch[i] = augment(batch[i], augmentation_, rng_);

      std::size_t n_replay = 0;
      if (!buffer_.empty()) {
        n_replay = static_cast<std::size_t>(
            std::lround(config_.replay_ratio * static_cast<double>(n_current)));
        if (n_replay > 0) {
          for (auto& ex : buffer_.sample_replay_batch(n_replay, rng_)) {
            batch.push_back(augmentation_.enabled() ? augment(ex, augmentation_, rng_)
                                                    : std::move(ex));
          }
        }
      }
      if (config_.batch_observer) config_.batch_observer(n_current, n_replay);

      const Matrix x = stack_features(batch);
      ForwardCache cache;
      model_.forward(x, &cache);
      Matrix old_sigmoids;
      if (!old_classes.empty()) old_sigmoids = sigmoid(snapshot_->forward(x));
      const LossGrad lg = icarl_loss_and_grad(cache.logits, stack_labels(batch), new_classes,
                                              old_classes, old_sigmoids);
      model_.sgd_step(model_.backward(cache, lg.dlogits), hyper_);
    }
  }

  for (int c : new_classes)
    if (std::find(seen_classes_.begin(), seen_classes_.end(), c) == seen_classes_.end())
      seen_classes_.push_back(c);
  std::sort(seen_classes_.begin(), seen_classes_.end());

  if (capacity_ > 0 && !seen_classes_.empty()) {
    AllocationPlan plan;
    plan.capacity = capacity_;
    const std::size_t per_class = capacity_ / seen_classes_.size();
    for (int c : seen_classes_) plan.quotas[c] = per_class;
    const auto feats = feature_rows(model_.extract_features(stack_features(exp.train)));
    buffer_.rebalance_after_task(plan, exp.train, SelectionStrategy{SelectionKind::kHerding},
                                 rng_, &feats);
  }
}

void StrategyRunner::train_gss(const Experience& exp) {
  const GradientFn grad_of = [this](const TaggedExample& ex) {
    return model_.per_example_gradient(ex, LossKind::kCrossEntropy);
  };
  for (int epoch = 0; epoch < hyper_.epochs; ++epoch) {
    const auto order = shuffled_indices(exp.train.size(), rng_);
    for (std::size_t b = 0; b < order.size(); b += hyper_.batch_size) {
      const std::size_t e = std::min(order.size(), b + hyper_.batch_size);
      auto batch = assemble_batch(exp.train, order, b, e);
      const std::size_t n_current = batch.size();

      std::size_t n_replay = 0;
      if (!buffer_.empty()) {
        n_replay = static_cast<std::size_t>(
            std::lround(config_.replay_ratio * static_cast<double>(n_current)));
        if (n_replay > 0) {
          for (auto& ex : buffer_.sample_replay_batch(n_replay, rng_)) {
            batch.push_back(augmentation_.enabled() ? augment(ex, augmentation_, rng_)
                                                    : std::move(ex));
          }
        }
      }
      if (config_.batch_observer) config_.batch_observer(n_current, n_replay);
      cross_entropy_step(batch);

      for (std::size_t i = 0; i < n_current; ++i)
        buffer_.gss_greedy_update(batch[i], grad_of, config_.gss_n_compare, rng_);
    }
  }
}

void StrategyRunner::train_experience(const Experience& exp) {
  switch (config_.kind) {
    case StrategyKind::kNaive: train_naive(exp); break;
    case StrategyKind::kReplay: train_replay(exp); break;
    case StrategyKind::kGdumb: train_gdumb(exp); break;
    case StrategyKind::kICarl: train_icarl(exp); break;
    case StrategyKind::kGss: train_gss(exp); break;
  }
}

std::vector<int> StrategyRunner::predict(const Matrix& batch) const {
  if (config_.kind == StrategyKind::kICarl && !buffer_.empty()) {
    // nearest-mean-of-exemplars in the current feature space
    std::map<int, Vector> means;
    for (const auto& [cls, entries] : buffer_.groups()) {
      if (entries.empty()) continue;
      std::vector<TaggedExample> exemplars;
      exemplars.reserve(entries.size());
      for (const auto& entry : entries) exemplars.push_back(entry.example);
      const Matrix feats = model_.extract_features(stack_features(exemplars));
      means[cls] = feats.colwise().mean().transpose();
    }
    return nme_classify_batch(model_.extract_features(batch), means);
  }

  const Matrix logits = model_.forward(batch);
  std::vector<int> out(logits.rows());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < logits.cols(); ++j)
      if (logits(r, j) > logits(r, best)) best = j;
    out[r] = static_cast<int>(best);
  }
  return out;
}

double StrategyRunner::evaluate(const std::vector<TaggedExample>& test_set) const {
  if (test_set.empty()) return 0.0;
  std::size_t correct = 0;
  constexpr std::size_t kChunk = 256;
  for (std::size_t b = 0; b < test_set.size(); b += kChunk) {
    const std::size_t e = std::min(test_set.size(), b + kChunk);
    std::vector<TaggedExample> chunk(test_set.begin() + b, test_set.begin() + e);
    const auto preds = predict(stack_features(chunk));
    for (std::size_t i = 0; i < chunk.size(); ++i)
      if (preds[i] == chunk[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

RunResult run_stream(const StrategyConfig& config, const TaskStream& stream,
                     const Hyperparams& hyper, std::size_t capacity,
                     const WeightingPolicy& policy, const AugmentationSpec& augmentation,
                     std::uint64_t seed) {
  if (stream.experiences.empty()) throw ConfigError("run_stream: empty stream");
  MlpConfig model_config;
  model_config.input_dim = static_cast<Eigen::Index>(stream.input_dim());
  model_config.n_classes = stream.n_classes;

  StrategyRunner runner(config, model_config, hyper, policy, augmentation, capacity, seed);
  const std::size_t n = stream.experiences.size();
  AccuracyMatrix matrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    runner.train_experience(stream.experiences[i]);
    for (std::size_t j = 0; j < n; ++j)
      matrix.at(i, j) = runner.evaluate(stream.experiences[j].test);
  }
  return RunResult{matrix, runner.model()};
}

}  // namespace replaykit
