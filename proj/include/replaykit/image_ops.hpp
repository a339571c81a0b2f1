#pragma once

#include "replaykit/tensor.hpp"

namespace replaykit {

Tensor hflip_image(const Tensor& img);
Tensor vflip_image(const Tensor& img);

// Rotates around the image center, bilinear sampling, zero fill outside.
Tensor rotate_image(const Tensor& img, double angle_deg);

// Crops a window of relative area `scale` (side length scaled by sqrt(scale))
// at the offset given by top_frac/left_frac in [0, 1], then bilinearly resizes
// back to the original HxW.
Tensor resize_crop_image(const Tensor& img, double scale, double top_frac, double left_frac);

}  // namespace replaykit
