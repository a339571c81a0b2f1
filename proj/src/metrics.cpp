#include "replaykit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "replaykit/errors.hpp"

namespace replaykit {

double average_accuracy(const AccuracyMatrix& matrix) {
  const std::size_t n = matrix.size();
  if (n == 0) throw Error("EmptyMatrix: average_accuracy");
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += matrix.at(n - 1, j);
  return sum / static_cast<double>(n);
}

std::vector<double> forgetting(const AccuracyMatrix& matrix) {
  const std::size_t n = matrix.size();
  if (n < 2) throw Error("TooFewExperiences: forgetting needs n >= 2");
  std::vector<double> out(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    double best = matrix.at(0, j);
    for (std::size_t i = 1; i + 1 < n; ++i) best = std::max(best, matrix.at(i, j));
    out[j] = best - matrix.at(n - 1, j);
  }
  return out;
}

std::optional<ElbowResult> elbow_point(const std::vector<CurvePoint>& curve) {
  if (curve.size() < 3) throw Error("TooFewPoints: elbow_point needs >= 3 points");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].memory_size == 0)
      throw Error("NonMonotonicX: memory sizes must be positive for log scaling");
    if (i > 0 && curve[i].memory_size <= curve[i - 1].memory_size)
      throw Error("NonMonotonicX: memory sizes must be strictly increasing");
  }

  const std::size_t n = curve.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(static_cast<double>(curve[i].memory_size));
    y[i] = curve[i].accuracy;
  }
  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  const double y_min = *ymin_it;
  const double y_range = *ymax_it - y_min;
  const double x_min = x[0];
  const double x_range = x[n - 1] - x[0];
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (x[i] - x_min) / x_range;
    y[i] = y_range > 0.0 ? (y[i] - y_min) / y_range : 0.0;
  }

  // distance from each interior point to the first-to-last chord
  const double dx = x[n - 1] - x[0], dy = y[n - 1] - y[0];
  const double chord_len = std::sqrt(dx * dx + dy * dy);
  double best = 0.0;
  std::size_t best_idx = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double cross = (x[i] - x[0]) * dy - (y[i] - y[0]) * dx;
    const double dist = std::abs(cross) / chord_len;
    if (dist > best) {  // strict: ties keep the smaller memory size
      best = dist;
      best_idx = i;
    }
  }
  if (best < 1e-6) return std::nullopt;
  return ElbowResult{curve[best_idx].memory_size, curve[best_idx].accuracy, best};
}

}  // namespace replaykit
