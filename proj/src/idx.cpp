#include "replaykit/idx.hpp"

#include <cstdint>
#include <fstream>

#include "replaykit/errors.hpp"

namespace replaykit {
namespace {

constexpr std::uint32_t kImageMagic = 2051;  // dtype 0x08, ndim 3
constexpr std::uint32_t kLabelMagic = 2049;  // dtype 0x08, ndim 1

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("TruncatedFile: cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_u32_be(const std::vector<unsigned char>& buf, std::size_t off,
                          const std::string& path) {
  if (off + 4 > buf.size()) throw DataError("TruncatedFile: short header in " + path);
  return (std::uint32_t{buf[off]} << 24) | (std::uint32_t{buf[off + 1]} << 16) |
         (std::uint32_t{buf[off + 2]} << 8) | std::uint32_t{buf[off + 3]};
}

}  // namespace

std::vector<std::pair<Tensor, int>> load_idx(const std::string& images_path,
                                             const std::string& labels_path) {
  const auto img = read_file(images_path);
  const auto lab = read_file(labels_path);

  if (read_u32_be(img, 0, images_path) != kImageMagic)
    throw DataError("BadMagic: expected image magic 2051 in " + images_path);
  if (read_u32_be(lab, 0, labels_path) != kLabelMagic)
    throw DataError("BadMagic: expected label magic 2049 in " + labels_path);

  const std::size_t n_img = read_u32_be(img, 4, images_path);
  const std::size_t rows = read_u32_be(img, 8, images_path);
  const std::size_t cols = read_u32_be(img, 12, images_path);
  const std::size_t n_lab = read_u32_be(lab, 4, labels_path);

  if (n_img != n_lab)
    throw DataError("CountMismatch: " + std::to_string(n_img) + " images vs " +
                    std::to_string(n_lab) + " labels");
  if (img.size() < 16 + n_img * rows * cols)
    throw DataError("TruncatedFile: image data short in " + images_path);
  if (lab.size() < 8 + n_lab)
    throw DataError("TruncatedFile: label data short in " + labels_path);

  std::vector<std::pair<Tensor, int>> out;
  out.reserve(n_img);
  std::size_t off = 16;
  for (std::size_t i = 0; i < n_img; ++i) {
    Tensor t = Tensor::image(rows, cols);
    for (std::size_t p = 0; p < rows * cols; ++p) {
      t.values[p] = static_cast<double>(img[off + p]) / 255.0;
    }
    off += rows * cols;
    out.emplace_back(std::move(t), static_cast<int>(lab[8 + i]));
  }
  return out;
}

}  // namespace replaykit
