#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tropedge {

/// Failure categories surfaced by the library. The numeric values are the
/// ones the C API and the CLI report, so they must stay stable.
enum class ErrorCode : int {
  InvalidInput = 1,
  Io = 2,
  UnknownMethod = 3,
  EmptyInput = 4,
  DimensionMismatch = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

/// Dense single-channel image of doubles, row-major. Pixels are addressed as
/// (row, col); row 0 is the top of the image.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  /// Builds an image from nested rows; all rows must have equal length.
  static Image from_rows(std::initializer_list<std::initializer_list<double>> rows);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(int row, int col) const noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  double& operator()(int row, int col) noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  std::span<const double> pixels() const noexcept { return data_; }
  std::span<double> pixels() noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Interleaved multi-channel image (e.g. RGB straight from a PNG).
struct ColorImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;  // size = width * height * channels
};

/// Square odd-sized kernel with its anchor at the centre cell.
///
/// Cells can be switched off through the support mask. Classical convolution
/// treats an inactive cell as a zero weight; tropical convolution skips it
/// entirely (it is the semiring zero, +inf for min-plus, -inf for max-plus).
/// This is how the 2x2 Roberts masks are embedded in a 3x3 frame.
class Kernel {
 public:
  Kernel() = default;
  Kernel(int size, std::vector<double> coeffs);
  Kernel(int size, std::vector<double> coeffs, std::vector<std::uint8_t> support);

  static Kernel from_rows(std::initializer_list<std::initializer_list<double>> rows);

  int size() const noexcept { return size_; }
  int radius() const noexcept { return size_ / 2; }
  double operator()(int row, int col) const noexcept {
    return coeffs_[static_cast<std::size_t>(row) * size_ + col];
  }
  bool active(int row, int col) const noexcept {
    return support_[static_cast<std::size_t>(row) * size_ + col] != 0;
  }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<const std::uint8_t> support() const noexcept { return support_; }

  Kernel transposed() const;
  Kernel negated() const;

  bool operator==(const Kernel&) const = default;

 private:
  int size_ = 0;
  std::vector<double> coeffs_;
  std::vector<std::uint8_t> support_;
};

/// Binary edge map; one byte per pixel, 0 or 1.
class EdgeMap {
 public:
  EdgeMap() = default;
  EdgeMap(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool operator()(int row, int col) const noexcept {
    return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  void set(int row, int col, bool on) noexcept {
    bits_[static_cast<std::size_t>(row) * width_ + col] = on ? 1 : 0;
  }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::size_t count() const noexcept;
  bool same_shape(const Image& img) const noexcept {
    return width_ == img.width() && height_ == img.height();
  }

  /// 1.0 where an edge is set, 0.0 elsewhere.
  Image to_image() const;
  /// Pixels with value >= threshold become edges.
  static EdgeMap from_image(const Image& img, double threshold = 0.5);

  bool operator==(const EdgeMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class PaddingMode { Zero, Replicate };

Image to_grayscale(const ColorImage& rgb);

Image pad(const Image& img, int margin, PaddingMode mode);
Image crop(const Image& img, int margin);

/// Bilinear resize by a scale factor; output dims are round(dim * factor).
Image resize(const Image& img, double factor);
/// Bilinear resize to explicit dimensions (pixel-centre aligned).
Image resize_to(const Image& img, int width, int height);

/// Affine map of [min, max] onto [0, 1]. A constant image maps to zeros.
Image normalize(const Image& img);

Image transpose(const Image& img);

/// Separable Gaussian blur with replicate borders, radius ceil(3 sigma).
/// sigma <= 0 returns the input unchanged.
Image gaussian_blur(const Image& img, double sigma);

/// Mean over a window x window neighbourhood (replicate borders).
Image box_mean(const Image& img, int window);

struct Range {
  double min;
  double max;
};
Range value_range(const Image& img);

}  // namespace tropedge
