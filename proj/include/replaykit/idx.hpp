#pragma once

#include <string>
#include <utility>
#include <vector>

#include "replaykit/tensor.hpp"

namespace replaykit {

// Loads an MNIST-family IDX image/label file pair. Big-endian headers:
// magic (0, 0, dtype, ndim), then ndim 32-bit dims, then raw unsigned bytes.
// Pixel values are scaled to [0, 1]; each image keeps its HxW shape.
// Throws DataError("BadMagic..."), ("CountMismatch...") or ("TruncatedFile...").
std::vector<std::pair<Tensor, int>> load_idx(const std::string& images_path,
                                             const std::string& labels_path);

}  // namespace replaykit
