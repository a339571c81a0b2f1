#include "replaykit/losses.hpp"

#include <algorithm>
#include <cmath>

#include "replaykit/errors.hpp"

namespace replaykit {

LossGrad cross_entropy_loss_and_grad(const Matrix& logits, const std::vector<int>& labels) {
  const Eigen::Index n = logits.rows(), c = logits.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw Error("ShapeMismatch: labels vs logits rows");

  LossGrad out;
  out.dlogits = Matrix(n, c);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= c) throw Error("ShapeMismatch: label out of range");
    const double m = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < c; ++j) sum += std::exp(logits(i, j) - m);
    const double log_z = m + std::log(sum);
    loss += log_z - logits(i, labels[i]);
    for (Eigen::Index j = 0; j < c; ++j) {
      const double p = std::exp(logits(i, j) - log_z);
      out.dlogits(i, j) = (p - (j == labels[i] ? 1.0 : 0.0)) / static_cast<double>(n);
    }
  }
  out.loss = loss / static_cast<double>(n);
  return out;
}

Matrix sigmoid(const Matrix& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

LossGrad icarl_loss_and_grad(const Matrix& logits, const std::vector<int>& labels,
                             const std::vector<int>& new_classes,
                             const std::vector<int>& old_classes,
                             const Matrix& old_class_sigmoids) {
  const Eigen::Index n = logits.rows(), c = logits.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw Error("ShapeMismatch: labels vs logits rows");
  for (int nc : new_classes)
    for (int oc : old_classes)
      if (nc == oc) throw Error("IndexOverlap: class " + std::to_string(nc) + " is both old and new");
  if (!old_classes.empty() && (old_class_sigmoids.rows() != n || old_class_sigmoids.cols() != c))
    throw Error("ShapeMismatch: old-class targets");

  std::vector<std::pair<int, bool>> seen;  // (class, is_new)
  for (int cls : new_classes) seen.emplace_back(cls, true);
  for (int cls : old_classes) seen.emplace_back(cls, false);
  std::sort(seen.begin(), seen.end());
  if (seen.empty()) throw Error("icarl_loss_and_grad: no seen classes");
  for (const auto& [cls, is_new] : seen)
    if (cls < 0 || cls >= c) throw Error("ShapeMismatch: class id out of logit range");

  LossGrad out;
  out.dlogits = Matrix::Zero(n, c);
  const double denom = static_cast<double>(n) * static_cast<double>(seen.size());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& [cls, is_new] : seen) {
      const double z = logits(i, cls);
      const double target = is_new ? (labels[i] == cls ? 1.0 : 0.0) : old_class_sigmoids(i, cls);
      // stable BCE on the logit: max(z,0) - z*t + log(1 + exp(-|z|))
      loss += std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z)));
      out.dlogits(i, cls) = (1.0 / (1.0 + std::exp(-z)) - target) / denom;
    }
  }
  out.loss = loss / denom;
  return out;
}

int nme_classify(const Vector& feature, const std::map<int, Vector>& class_means) {
  if (class_means.empty()) throw Error("NoExemplars: no class means available");
  int best_class = class_means.begin()->first;
  double best_d2 = -1.0;
  for (const auto& [cls, mean] : class_means) {
    if (mean.size() != feature.size()) throw Error("ShapeMismatch: class mean size");
    const double d2 = (feature - mean).squaredNorm();
    if (best_d2 < 0.0 || d2 < best_d2) {  // map order makes ties pick the lower id
      best_d2 = d2;
      best_class = cls;
    }
  }
  return best_class;
}

std::vector<int> nme_classify_batch(const Matrix& features,
                                    const std::map<int, Vector>& class_means) {
  std::vector<int> out;
  out.reserve(features.rows());
  for (Eigen::Index r = 0; r < features.rows(); ++r)
    out.push_back(nme_classify(features.row(r).transpose(), class_means));
  return out;
}

}  // namespace replaykit
