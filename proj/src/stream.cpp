#include "replaykit/stream.hpp"

#include <algorithm>
#include <cmath>

#include "replaykit/errors.hpp"
#include "replaykit/idx.hpp"
#include "replaykit/image_ops.hpp"
#include "replaykit/rng.hpp"

namespace replaykit {
namespace {

constexpr int kMeanRejectionBudget = 10000;

// Per-class sample pools, indexed by class id.
struct ClassPools {
  std::vector<std::vector<Tensor>> train;
  std::vector<std::vector<Tensor>> test;
};

std::vector<std::vector<double>> draw_class_means(int n_classes, std::size_t dim,
                                                  double separation, Rng& rng) {
  // Component scale separation/sqrt(dim) keeps the typical pairwise distance
  // near 1.4 * separation independent of dimension; the rejection loop
  // enforces the hard lower bound.
  const double scale = separation / std::sqrt(static_cast<double>(dim));
  std::vector<std::vector<double>> means;
  means.reserve(n_classes);
  int attempts = 0;
  while (static_cast<int>(means.size()) < n_classes) {
    if (++attempts > kMeanRejectionBudget)
      throw DataError("RejectionBudgetExceeded: cannot place " + std::to_string(n_classes) +
                      " class means at separation " + std::to_string(separation));
    std::vector<double> m(dim);
    for (auto& v : m) v = scale * rng.normal();
    bool ok = true;
    for (const auto& other : means) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < dim; ++i) d2 += (m[i] - other[i]) * (m[i] - other[i]);
      if (d2 < separation * separation) {
        ok = false;
        break;
      }
    }
    if (ok) means.push_back(std::move(m));
  }
  return means;
}

ClassPools materialize_synthetic(const DatasetSpec& spec, Rng& rng) {
  if (spec.sigma <= 0.0) throw ConfigError("synthetic sigma must be > 0");
  if (spec.separation <= 0.0) throw ConfigError("synthetic separation must be > 0");
  const auto means = draw_class_means(spec.n_classes, spec.dim, spec.separation, rng);

  ClassPools pools;
  pools.train.resize(spec.n_classes);
  pools.test.resize(spec.n_classes);
  auto draw = [&](const std::vector<double>& mean) {
    std::vector<double> v(spec.dim);
    for (std::size_t i = 0; i < spec.dim; ++i) v[i] = mean[i] + spec.sigma * rng.normal();
    return Tensor::flat(std::move(v));
  };
  for (int c = 0; c < spec.n_classes; ++c) {
    for (int i = 0; i < spec.per_class_train; ++i) pools.train[c].push_back(draw(means[c]));
    for (int i = 0; i < spec.per_class_test; ++i) pools.test[c].push_back(draw(means[c]));
  }
  return pools;
}

Tensor draw_base_pattern(std::size_t h, std::size_t w, Rng& rng) {
  Tensor base = Tensor::image(h, w);
  for (auto& v : base.values) v = rng.uniform();
  // two 3x3 box-blur passes give patterns that survive bilinear rotation
  for (int pass = 0; pass < 2; ++pass) {
    Tensor blurred = base;
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        double sum = 0.0;
        int count = 0;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const long rr = static_cast<long>(r) + dr, cc = static_cast<long>(c) + dc;
            if (rr < 0 || cc < 0 || rr >= static_cast<long>(h) || cc >= static_cast<long>(w)) continue;
            sum += base.at(rr, cc);
            ++count;
          }
        }
        blurred.at(r, c) = sum / count;
      }
    }
    base = blurred;
  }
  const auto [lo, hi] = std::minmax_element(base.values.begin(), base.values.end());
  const double range = *hi - *lo;
  if (range > 0) {
    for (auto& v : base.values) v = (v - *lo) / range;
  }
  return base;
}

ClassPools materialize_pattern_images(const DatasetSpec& spec, Rng& rng) {
  if (spec.sigma <= 0.0) throw ConfigError("pattern image sigma must be > 0");
  std::vector<Tensor> bases;
  bases.reserve(spec.n_classes);
  for (int c = 0; c < spec.n_classes; ++c)
    bases.push_back(draw_base_pattern(spec.image_height, spec.image_width, rng));

  ClassPools pools;
  pools.train.resize(spec.n_classes);
  pools.test.resize(spec.n_classes);
  auto draw = [&](const Tensor& base) {
    const double angle = rng.uniform(-spec.rotation_range_deg, spec.rotation_range_deg);
    Tensor t = rotate_image(base, angle);
    for (auto& v : t.values) v += spec.sigma * rng.normal();
    return t;
  };
  for (int c = 0; c < spec.n_classes; ++c) {
    for (int i = 0; i < spec.per_class_train; ++i) pools.train[c].push_back(draw(bases[c]));
    for (int i = 0; i < spec.per_class_test; ++i) pools.test[c].push_back(draw(bases[c]));
  }
  return pools;
}

ClassPools materialize_idx(const DatasetSpec& spec) {
  ClassPools pools;
  pools.train.resize(spec.n_classes);
  pools.test.resize(spec.n_classes);
  auto fill = [&](std::vector<std::vector<Tensor>>& dst, const std::string& images,
                  const std::string& labels) {
    for (auto& [tensor, label] : load_idx(images, labels)) {
      if (label < 0 || label >= spec.n_classes)
        throw DataError("label " + std::to_string(label) + " out of range for " +
                        std::to_string(spec.n_classes) + " classes");
      dst[label].push_back(std::move(tensor));
    }
  };
  fill(pools.train, spec.train_images, spec.train_labels);
  fill(pools.test, spec.test_images, spec.test_labels);
  return pools;
}

ClassPools materialize(const DatasetSpec& spec, Rng& rng) {
  switch (spec.source) {
    case DatasetSource::kSynthetic:
      return materialize_synthetic(spec, rng);
    case DatasetSource::kSyntheticImages:
      return materialize_pattern_images(spec, rng);
    case DatasetSource::kIdxFiles:
      return materialize_idx(spec);
  }
  throw ConfigError("unknown dataset source");
}

}  // namespace

std::size_t TaskStream::input_dim() const {
  for (const auto& exp : experiences) {
    if (!exp.train.empty()) return exp.train.front().features.size();
    if (!exp.test.empty()) return exp.test.front().features.size();
  }
  return 0;
}

std::vector<int> shuffled_class_order(int n_classes, std::uint64_t seed) {
  std::vector<int> order(n_classes);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, fnv1a("class-order", 11)));
  rng.shuffle(order);
  return order;
}

TaskStream make_split_stream(const DatasetSpec& spec, int n_experiences,
                             const std::vector<int>& class_order, std::uint64_t seed) {
  if (n_experiences < 1) throw ConfigError("n_experiences must be >= 1");
  if (spec.n_classes < 1) throw ConfigError("n_classes must be >= 1");
  if (spec.n_classes % n_experiences != 0)
    throw ConfigError("NotDivisible: " + std::to_string(spec.n_classes) + " classes into " +
                      std::to_string(n_experiences) + " experiences");
  if (spec.validation_fraction < 0.0 || spec.validation_fraction >= 1.0)
    throw ConfigError("validation_fraction must be in [0, 1)");

  std::vector<bool> seen(spec.n_classes, false);
  if (static_cast<int>(class_order.size()) != spec.n_classes)
    throw ConfigError("InvalidPermutation: class_order has wrong length");
  for (int c : class_order) {
    if (c < 0 || c >= spec.n_classes || seen[c])
      throw ConfigError("InvalidPermutation: class_order is not a permutation");
    seen[c] = true;
  }

  Rng rng(seed);
  ClassPools pools = materialize(spec, rng);

  // Stable sample ids: train pools first, then test pools, in class id order.
  std::uint64_t next_id = 0;
  std::vector<std::vector<std::uint64_t>> train_ids(spec.n_classes), test_ids(spec.n_classes);
  for (int c = 0; c < spec.n_classes; ++c)
    for (std::size_t i = 0; i < pools.train[c].size(); ++i) train_ids[c].push_back(next_id++);
  for (int c = 0; c < spec.n_classes; ++c)
    for (std::size_t i = 0; i < pools.test[c].size(); ++i) test_ids[c].push_back(next_id++);

  TaskStream stream;
  stream.seed = seed;
  stream.n_classes = spec.n_classes;
  stream.class_order = class_order;

  const int per_exp = spec.n_classes / n_experiences;
  for (int k = 0; k < n_experiences; ++k) {
    Experience exp;
    exp.task_id = k;
    for (int p = k * per_exp; p < (k + 1) * per_exp; ++p) exp.classes.push_back(class_order[p]);
    std::sort(exp.classes.begin(), exp.classes.end());

    for (int p = k * per_exp; p < (k + 1) * per_exp; ++p) {
      const int c = class_order[p];
      auto& pool = pools.train[c];
      const std::size_t n_val =
          static_cast<std::size_t>(spec.validation_fraction * static_cast<double>(pool.size()));
      std::vector<bool> is_val(pool.size(), false);
      for (std::size_t i : rng.sample_indices(pool.size(), n_val)) is_val[i] = true;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        TaggedExample ex{std::move(pool[i]), c, k, train_ids[c][i]};
        (is_val[i] ? exp.val : exp.train).push_back(std::move(ex));
      }
      for (std::size_t i = 0; i < pools.test[c].size(); ++i) {
        exp.test.push_back(TaggedExample{std::move(pools.test[c][i]), c, k, test_ids[c][i]});
      }
    }
    stream.experiences.push_back(std::move(exp));
  }
  return stream;
}

TaskStream make_synthetic_stream(int n_classes, std::size_t dim, int per_class_train,
                                 int per_class_test, double separation, double sigma,
                                 int n_experiences, std::uint64_t seed) {
  if (n_classes < n_experiences) throw ConfigError("need n_classes >= n_experiences");
  DatasetSpec spec;
  spec.source = DatasetSource::kSynthetic;
  spec.n_classes = n_classes;
  spec.dim = dim;
  spec.per_class_train = per_class_train;
  spec.per_class_test = per_class_test;
  spec.separation = separation;
  spec.sigma = sigma;
  std::vector<int> order(n_classes);
  std::iota(order.begin(), order.end(), 0);
  return make_split_stream(spec, n_experiences, order, seed);
}

TaskStream make_pattern_image_stream(int n_classes, std::size_t height, std::size_t width,
                                     int per_class_train, int per_class_test,
                                     double rotation_range_deg, double sigma,
                                     int n_experiences, std::uint64_t seed) {
  if (n_classes < n_experiences) throw ConfigError("need n_classes >= n_experiences");
  DatasetSpec spec;
  spec.source = DatasetSource::kSyntheticImages;
  spec.n_classes = n_classes;
  spec.image_height = height;
  spec.image_width = width;
  spec.per_class_train = per_class_train;
  spec.per_class_test = per_class_test;
  spec.rotation_range_deg = rotation_range_deg;
  spec.sigma = sigma;
  std::vector<int> order(n_classes);
  std::iota(order.begin(), order.end(), 0);
  return make_split_stream(spec, n_experiences, order, seed);
}

}  // namespace replaykit
