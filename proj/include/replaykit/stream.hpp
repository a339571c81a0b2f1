#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "replaykit/tensor.hpp"

namespace replaykit {

// A contiguous segment of the stream holding a disjoint class subset.
struct Experience {
  int task_id = 0;
  std::vector<int> classes;  // sorted
  std::vector<TaggedExample> train;
  std::vector<TaggedExample> val;
  std::vector<TaggedExample> test;
};

struct TaskStream {
  std::vector<Experience> experiences;
  std::vector<int> class_order;
  std::uint64_t seed = 0;
  int n_classes = 0;

  std::size_t input_dim() const;
};

enum class DatasetSource { kIdxFiles, kSynthetic, kSyntheticImages };

struct DatasetSpec {
  DatasetSource source = DatasetSource::kSynthetic;
  int n_classes = 10;
  double validation_fraction = 0.1;

  // idx-files
  std::string train_images, train_labels, test_images, test_labels;

  // synthetic gaussian blobs (flat vectors) and pattern images
  std::size_t dim = 32;
  int per_class_train = 100;
  int per_class_test = 40;
  double separation = 4.0;  // minimum pairwise distance between class means
  double sigma = 1.0;       // per-feature noise scale

  // pattern images (rotated base patterns per class)
  std::size_t image_height = 8;
  std::size_t image_width = 8;
  double rotation_range_deg = 15.0;

  bool operator==(const DatasetSpec&) const = default;
};

// Seeded Fisher-Yates permutation of 0..n_classes-1.
std::vector<int> shuffled_class_order(int n_classes, std::uint64_t seed);

// Builds a class-incremental stream: experience k holds the classes at
// positions [k*C/E, (k+1)*C/E) of class_order. The validation split carves
// floor(validation_fraction * n) samples per class, uniformly at random.
// Deterministic per (spec, class_order, seed).
TaskStream make_split_stream(const DatasetSpec& spec, int n_experiences,
                             const std::vector<int>& class_order, std::uint64_t seed);

// Gaussian-blob stream: class means are drawn from a seeded RNG with pairwise
// distance >= separation enforced by rejection (budget 10000 attempts),
// samples are mean + sigma * gaussian noise.
TaskStream make_synthetic_stream(int n_classes, std::size_t dim, int per_class_train,
                                 int per_class_test, double separation, double sigma,
                                 int n_experiences, std::uint64_t seed);

// Image stream: each class has a random smooth base pattern; every sample is
// the base rotated by a uniform angle in +-rotation_range_deg plus pixel noise.
TaskStream make_pattern_image_stream(int n_classes, std::size_t height, std::size_t width,
                                     int per_class_train, int per_class_test,
                                     double rotation_range_deg, double sigma,
                                     int n_experiences, std::uint64_t seed);

}  // namespace replaykit
