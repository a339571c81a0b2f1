#pragma once

#include <string>
#include <vector>

#include "replaykit/rng.hpp"
#include "replaykit/tensor.hpp"

namespace replaykit {

enum class TransformKind { kHorizontalFlip, kVerticalFlip, kResizeCrop, kRotation };

enum class ApplyTo { kBufferOnly, kBufferAndStream };

struct AugmentationSpec {
  std::vector<TransformKind> transforms;  // applied in this order, per draw
  double flip_probability = 0.5;
  double crop_scale_min = 0.6;
  double crop_scale_max = 1.0;
  double rotation_range_deg = 15.0;
  ApplyTo apply_to = ApplyTo::kBufferOnly;

  bool enabled() const { return !transforms.empty(); }
  bool operator==(const AugmentationSpec&) const = default;
};

const char* to_string(TransformKind kind);
TransformKind transform_kind_from_string(const std::string& name);

// Applies every enabled transform with freshly drawn parameters: flips with
// the configured probability, crop scale uniform in its range, rotation angle
// uniform in +-range. Label, task id and shape are unchanged. Geometric
// transforms on flat (non-image) examples throw Error("NotAnImage...").
TaggedExample augment(const TaggedExample& example, const AugmentationSpec& spec, Rng& rng);

}  // namespace replaykit
