#include "replaykit/image_ops.hpp"

#include <algorithm>
#include <cmath>

namespace replaykit {
namespace {

// Bilinear read at fractional (y, x); zero outside the image.
double sample_bilinear(const Tensor& img, double y, double x, std::size_t ch) {
  const auto h = static_cast<long>(img.height());
  const auto w = static_cast<long>(img.width());
  const long y0 = static_cast<long>(std::floor(y));
  const long x0 = static_cast<long>(std::floor(x));
  const double fy = y - static_cast<double>(y0);
  const double fx = x - static_cast<double>(x0);

  auto pix = [&](long r, long c) -> double {
    if (r < 0 || r >= h || c < 0 || c >= w) return 0.0;
    return img.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c), ch);
  };
  return pix(y0, x0) * (1 - fy) * (1 - fx) + pix(y0, x0 + 1) * (1 - fy) * fx +
         pix(y0 + 1, x0) * fy * (1 - fx) + pix(y0 + 1, x0 + 1) * fy * fx;
}

}  // namespace

Tensor hflip_image(const Tensor& img) {
  Tensor out = img;
  const std::size_t h = img.height(), w = img.width(), c = img.channels();
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t col = 0; col < w; ++col)
      for (std::size_t ch = 0; ch < c; ++ch)
        out.at(r, col, ch) = img.at(r, w - 1 - col, ch);
  return out;
}

Tensor vflip_image(const Tensor& img) {
  Tensor out = img;
  const std::size_t h = img.height(), w = img.width(), c = img.channels();
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t col = 0; col < w; ++col)
      for (std::size_t ch = 0; ch < c; ++ch)
        out.at(r, col, ch) = img.at(h - 1 - r, col, ch);
  return out;
}

Tensor rotate_image(const Tensor& img, double angle_deg) {
  Tensor out = img;
  const std::size_t h = img.height(), w = img.width(), c = img.channels();
  const double a = angle_deg * 3.14159265358979323846 / 180.0;
  const double cos_a = std::cos(a), sin_a = std::sin(a);
  const double cy = (static_cast<double>(h) - 1.0) / 2.0;
  const double cx = (static_cast<double>(w) - 1.0) / 2.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t col = 0; col < w; ++col) {
      // inverse map: rotate the destination coordinate by -angle
      const double dy = static_cast<double>(r) - cy;
      const double dx = static_cast<double>(col) - cx;
      const double sy = cy + dy * cos_a - dx * sin_a;
      const double sx = cx + dy * sin_a + dx * cos_a;
      for (std::size_t ch = 0; ch < c; ++ch) out.at(r, col, ch) = sample_bilinear(img, sy, sx, ch);
    }
  }
  return out;
}

Tensor resize_crop_image(const Tensor& img, double scale, double top_frac, double left_frac) {
  const std::size_t h = img.height(), w = img.width(), c = img.channels();
  const double side = std::sqrt(std::clamp(scale, 0.0, 1.0));
  const std::size_t ch_crop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(side * static_cast<double>(h))));
  const std::size_t cw_crop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(side * static_cast<double>(w))));
  const double top = std::clamp(top_frac, 0.0, 1.0) * static_cast<double>(h - ch_crop);
  const double left = std::clamp(left_frac, 0.0, 1.0) * static_cast<double>(w - cw_crop);

  Tensor out = img;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t col = 0; col < w; ++col) {
      // half-pixel mapping from output grid into the crop window
      const double sy = top + (static_cast<double>(r) + 0.5) * static_cast<double>(ch_crop) / static_cast<double>(h) - 0.5;
      const double sx = left + (static_cast<double>(col) + 0.5) * static_cast<double>(cw_crop) / static_cast<double>(w) - 0.5;
      const double cy = std::clamp(sy, top, top + static_cast<double>(ch_crop) - 1.0);
      const double cx = std::clamp(sx, left, left + static_cast<double>(cw_crop) - 1.0);
      for (std::size_t chn = 0; chn < c; ++chn) out.at(r, col, chn) = sample_bilinear(img, cy, cx, chn);
    }
  }
  return out;
}

}  // namespace replaykit
