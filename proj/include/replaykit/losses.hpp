#pragma once

#include <map>
#include <vector>

#include "replaykit/mlp.hpp"

namespace replaykit {

struct LossGrad {
  double loss = 0.0;
  Matrix dlogits;
};

// Mean softmax cross-entropy over the batch; gradient w.r.t. logits.
LossGrad cross_entropy_loss_and_grad(const Matrix& logits, const std::vector<int>& labels);

// Per-logit sigmoid BCE over the seen classes: targets are one-hot for the
// current experience's classes and the snapshot's sigmoid outputs for
// previously seen classes. Mean over batch and seen-class logits.
// old_class_sigmoids must be batch x n_classes when old_classes is non-empty.
LossGrad icarl_loss_and_grad(const Matrix& logits, const std::vector<int>& labels,
                             const std::vector<int>& new_classes,
                             const std::vector<int>& old_classes,
                             const Matrix& old_class_sigmoids);

Matrix sigmoid(const Matrix& z);

// Nearest-mean-of-exemplars prediction: argmin_c ||feature - mean_c||, ties
// toward the lower class id.
int nme_classify(const Vector& feature, const std::map<int, Vector>& class_means);
std::vector<int> nme_classify_batch(const Matrix& features,
                                    const std::map<int, Vector>& class_means);

}  // namespace replaykit
