#include "replaykit/augment.hpp"

#include "replaykit/errors.hpp"
#include "replaykit/image_ops.hpp"

namespace replaykit {

const char* to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::kHorizontalFlip: return "horizontal_flip";
    case TransformKind::kVerticalFlip: return "vertical_flip";
    case TransformKind::kResizeCrop: return "resize_crop";
    case TransformKind::kRotation: return "rotation";
  }
  return "?";
}

TransformKind transform_kind_from_string(const std::string& name) {
  for (TransformKind k : {TransformKind::kHorizontalFlip, TransformKind::kVerticalFlip,
                          TransformKind::kResizeCrop, TransformKind::kRotation}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown transform: " + name);
}

TaggedExample augment(const TaggedExample& example, const AugmentationSpec& spec, Rng& rng) {
  if (!spec.enabled()) return example;
  if (!example.features.is_image())
    throw Error("NotAnImage: geometric transforms need HxW shape metadata");

  TaggedExample out = example;
  for (TransformKind t : spec.transforms) {
    switch (t) {
      case TransformKind::kHorizontalFlip:
        if (rng.uniform() < spec.flip_probability) out.features = hflip_image(out.features);
        break;
      case TransformKind::kVerticalFlip:
        if (rng.uniform() < spec.flip_probability) out.features = vflip_image(out.features);
        break;
      case TransformKind::kResizeCrop: {
        const double scale = rng.uniform(spec.crop_scale_min, spec.crop_scale_max);
        const double top = rng.uniform();
        const double left = rng.uniform();
        out.features = resize_crop_image(out.features, scale, top, left);
        break;
      }
      case TransformKind::kRotation: {
        const double angle = rng.uniform(-spec.rotation_range_deg, spec.rotation_range_deg);
        out.features = rotate_image(out.features, angle);
        break;
      }
    }
  }
  return out;
}

}  // namespace replaykit
