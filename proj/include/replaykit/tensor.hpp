#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "replaykit/errors.hpp"

namespace replaykit {

// Dense real tensor with shape metadata. Rank 1 is a flat feature vector,
// rank 2 an HxW single-channel image, rank 3 an HxWxC image (channel-last).
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  std::size_t size() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
  }

  bool is_image() const { return shape.size() == 2 || shape.size() == 3; }

  std::size_t height() const { return require_image(), shape[0]; }
  std::size_t width() const { return require_image(), shape[1]; }
  std::size_t channels() const { return require_image(), shape.size() == 3 ? shape[2] : 1; }

  double at(std::size_t r, std::size_t c, std::size_t ch = 0) const {
    return values[(r * width() + c) * channels() + ch];
  }
  double& at(std::size_t r, std::size_t c, std::size_t ch = 0) {
    return values[(r * width() + c) * channels() + ch];
  }

  static Tensor flat(std::vector<double> v) {
    Tensor t;
    t.shape = {v.size()};
    t.values = std::move(v);
    return t;
  }

  static Tensor image(std::size_t h, std::size_t w, std::size_t c = 1) {
    Tensor t;
    t.shape = c == 1 ? std::vector<std::size_t>{h, w} : std::vector<std::size_t>{h, w, c};
    t.values.assign(h * w * c, 0.0);
    return t;
  }

 private:
  void require_image() const {
    if (!is_image()) throw Error("NotAnImage: tensor has no HxW shape metadata");
  }
};

// One sample of a task stream.
struct TaggedExample {
  Tensor features;
  int label = 0;
  int task_id = 0;
  std::uint64_t sample_id = 0;
};

}  // namespace replaykit
