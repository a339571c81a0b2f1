#include "replaykit/mlp.hpp"

#include <cmath>
#include <fstream>

#include "replaykit/errors.hpp"
#include "replaykit/losses.hpp"
#include "replaykit/rng.hpp"

namespace replaykit {

bool Gradients::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

Mlp::Mlp(const MlpConfig& config, std::uint64_t seed) : config_(config) {
  if (config_.input_dim < 1 || config_.n_classes < 1)
    throw ConfigError("Mlp: input_dim and n_classes must be >= 1");
  reinitialize(seed);
}

void Mlp::reinitialize(std::uint64_t seed) {
  Rng rng(mix_seed(seed, fnv1a("mlp-init", 8)));
  weights_.clear();
  biases_.clear();
  std::vector<Eigen::Index> dims{config_.input_dim};
  for (int l = 0; l < config_.hidden_layers; ++l) dims.push_back(config_.hidden_width);
  dims.push_back(config_.n_classes);

  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const Eigen::Index fan_in = dims[l], fan_out = dims[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    Matrix w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < fan_out; ++r)
      for (Eigen::Index c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
    weights_.push_back(std::move(w));
    biases_.push_back(Vector::Zero(fan_out));
  }
  weight_velocity_.clear();
  bias_velocity_.clear();
  for (const auto& w : weights_) weight_velocity_.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : biases_) bias_velocity_.push_back(Vector::Zero(b.size()));
}

Matrix Mlp::forward(const Matrix& batch, ForwardCache* cache) const {
  if (batch.cols() != config_.input_dim)
    throw Error("ShapeMismatch: batch has " + std::to_string(batch.cols()) +
                " features, model expects " + std::to_string(config_.input_dim));
  if (cache) {
    cache->inputs.clear();
    cache->preacts.clear();
  }

  Matrix a = batch;
  for (int l = 0; l < config_.hidden_layers; ++l) {
    if (cache) cache->inputs.push_back(a);
    Matrix z = (a * weights_[l].transpose()).rowwise() + biases_[l].transpose();
    if (cache) cache->preacts.push_back(z);
    a = z.cwiseMax(0.0);
  }
  if (cache) cache->inputs.push_back(a);
  Matrix logits =
      (a * weights_.back().transpose()).rowwise() + biases_.back().transpose();
  if (cache) cache->logits = logits;
  return logits;
}

Gradients Mlp::backward(const ForwardCache& cache, const Matrix& dlogits) const {
  const int layers = n_layers();
  Gradients g;
  g.weights.resize(layers);
  g.biases.resize(layers);

  Matrix dz = dlogits;
  for (int l = layers - 1; l >= 0; --l) {
    g.weights[l] = dz.transpose() * cache.inputs[l];
    g.biases[l] = dz.colwise().sum().transpose();
    if (l > 0) {
      Matrix da = dz * weights_[l];
      dz = da.cwiseProduct((cache.preacts[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return g;
}

void Mlp::sgd_step(const Gradients& grads, const Hyperparams& hyper) {
  if (!grads.all_finite()) throw Error("NonFiniteGradient: refusing sgd step");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weight_velocity_[l] = hyper.momentum * weight_velocity_[l] + grads.weights[l];
    weights_[l] -= hyper.learning_rate * weight_velocity_[l];
    bias_velocity_[l] = hyper.momentum * bias_velocity_[l] + grads.biases[l];
    biases_[l] -= hyper.learning_rate * bias_velocity_[l];
  }
}

Matrix Mlp::extract_features(const Matrix& batch) const {
  if (batch.cols() != config_.input_dim) throw Error("ShapeMismatch: extract_features");
  Matrix a = batch;
  for (int l = 0; l < config_.hidden_layers; ++l)
    a = ((a * weights_[l].transpose()).rowwise() + biases_[l].transpose()).cwiseMax(0.0);
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double norm = a.row(r).norm();
    if (norm > 0.0) a.row(r) /= norm;
  }
  return a;
}

std::vector<double> Mlp::per_example_gradient(const TaggedExample& example, LossKind loss) const {
  Matrix x(1, example.features.size());
  for (std::size_t i = 0; i < example.features.values.size(); ++i)
    x(0, static_cast<Eigen::Index>(i)) = example.features.values[i];

  ForwardCache cache;
  forward(x, &cache);
  LossGrad lg;
  switch (loss) {
    case LossKind::kCrossEntropy:
      lg = cross_entropy_loss_and_grad(cache.logits, {example.label});
      break;
  }
  const Gradients g = backward(cache, lg.dlogits);

  std::vector<double> flat;
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    flat.insert(flat.end(), g.weights[l].data(), g.weights[l].data() + g.weights[l].size());
    flat.insert(flat.end(), g.biases[l].data(), g.biases[l].data() + g.biases[l].size());
  }
  return flat;
}

std::vector<double> Mlp::flatten_parameters() const {
  std::vector<double> flat;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    flat.insert(flat.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
    flat.insert(flat.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
  }
  return flat;
}

void Mlp::save_checkpoint(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out.precision(17);
  out << config_.input_dim << ' ' << config_.n_classes << ' ' << config_.hidden_width << ' '
      << config_.hidden_layers << '\n';
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index i = 0; i < weights_[l].size(); ++i) out << weights_[l].data()[i] << ' ';
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) out << biases_[l](i) << ' ';
    out << '\n';
  }
}

Mlp Mlp::load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read checkpoint " + path);
  MlpConfig cfg;
  in >> cfg.input_dim >> cfg.n_classes >> cfg.hidden_width >> cfg.hidden_layers;
  Mlp model(cfg, 0);
  for (std::size_t l = 0; l < model.weights_.size(); ++l) {
    for (Eigen::Index i = 0; i < model.weights_[l].size(); ++i) in >> model.weights_[l].data()[i];
    for (Eigen::Index i = 0; i < model.biases_[l].size(); ++i) in >> model.biases_[l](i);
  }
  if (!in) throw DataError("TruncatedFile: checkpoint " + path);
  return model;
}

Matrix stack_features(const std::vector<TaggedExample>& examples) {
  if (examples.empty()) return Matrix(0, 0);
  const std::size_t dim = examples.front().features.size();
  Matrix batch(static_cast<Eigen::Index>(examples.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < examples.size(); ++r) {
    const auto& values = examples[r].features.values;
    if (values.size() != dim) throw Error("ShapeMismatch: mixed feature sizes in batch");
    for (std::size_t c = 0; c < dim; ++c)
      batch(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[c];
  }
  return batch;
}

std::vector<int> stack_labels(const std::vector<TaggedExample>& examples) {
  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const auto& ex : examples) labels.push_back(ex.label);
  return labels;
}

}  // namespace replaykit
