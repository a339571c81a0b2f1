#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace replaykit {

// R[i][j] = accuracy on experience j's test set after training experience i.
class AccuracyMatrix {
 public:
  AccuracyMatrix() = default;
  explicit AccuracyMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Mean of the last row (the final model's accuracy over all experiences).
double average_accuracy(const AccuracyMatrix& matrix);

// F_j = max_{i < n-1} R[i][j] - R[n-1][j], for j < n-1.
std::vector<double> forgetting(const AccuracyMatrix& matrix);

struct CurvePoint {
  std::size_t memory_size = 0;
  double accuracy = 0.0;
};

struct ElbowResult {
  std::size_t memory_size = 0;
  double accuracy = 0.0;
  double chord_distance = 0.0;
};

// Knee of a memory-accuracy curve: x is log-scaled then min-max normalized,
// y min-max normalized; the elbow is the interior point farthest from the
// chord between the first and last points (ties toward the smaller memory).
// Returns nothing when every point is within 1e-6 of the chord.
// Requires >= 3 points with strictly increasing positive memory sizes.
std::optional<ElbowResult> elbow_point(const std::vector<CurvePoint>& curve);

}  // namespace replaykit
