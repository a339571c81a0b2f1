#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "replaykit/tensor.hpp"

namespace replaykit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Hyperparams {
  double learning_rate = 0.01;
  double momentum = 0.0;
  int batch_size = 32;
  int epochs = 4;  // per experience

  bool operator==(const Hyperparams&) const = default;
};

struct MlpConfig {
  Eigen::Index input_dim = 0;
  Eigen::Index n_classes = 0;
  Eigen::Index hidden_width = 300;
  int hidden_layers = 3;
};

struct ForwardCache {
  std::vector<Matrix> inputs;   // input to each linear layer, batch x in_l
  std::vector<Matrix> preacts;  // hidden pre-activations
  Matrix logits;
};

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  bool all_finite() const;
};

enum class LossKind { kCrossEntropy };

// ReLU MLP (input -> hidden_width x hidden_layers -> n_classes) with manual
// forward/backward and SGD-with-momentum state. He-uniform init, seeded.
class Mlp {
 public:
  Mlp(const MlpConfig& config, std::uint64_t seed);

  void reinitialize(std::uint64_t seed);

  const MlpConfig& config() const { return config_; }
  int n_layers() const { return config_.hidden_layers + 1; }

  // logits, batch given as rows; fills the cache when provided
  Matrix forward(const Matrix& batch, ForwardCache* cache = nullptr) const;

  Gradients backward(const ForwardCache& cache, const Matrix& dlogits) const;

  // v <- momentum * v + g;  w <- w - lr * v. Rejects non-finite gradients.
  void sgd_step(const Gradients& grads, const Hyperparams& hyper);

  // Last hidden activations, L2-normalized per row (zero rows pass through).
  Matrix extract_features(const Matrix& batch) const;

  // Flat concatenation [W0, b0, W1, b1, ...] of this example's loss gradient.
  std::vector<double> per_example_gradient(const TaggedExample& example, LossKind loss) const;

  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }
  std::vector<Matrix>& mutable_weights() { return weights_; }
  std::vector<Vector>& mutable_biases() { return biases_; }

  std::vector<double> flatten_parameters() const;

  void save_checkpoint(const std::string& path) const;
  static Mlp load_checkpoint(const std::string& path);

 private:
  MlpConfig config_;
  std::vector<Matrix> weights_;  // layer l: out x in
  std::vector<Vector> biases_;
  std::vector<Matrix> weight_velocity_;
  std::vector<Vector> bias_velocity_;
};

// Stacks flattened example features into a batch matrix (rows = samples).
Matrix stack_features(const std::vector<TaggedExample>& examples);
std::vector<int> stack_labels(const std::vector<TaggedExample>& examples);

}  // namespace replaykit
