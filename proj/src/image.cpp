#include "tropedge/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tropedge {

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::InvalidInput, "image dimensions must be at least 1x1, got " +
                                      std::to_string(width) + "x" + std::to_string(height));
  }
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

}  // namespace

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::InvalidInput, "pixel buffer length does not match image dimensions");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidInput, "image contains a non-finite value");
  }
}

Image Image::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const int h = static_cast<int>(rows.size());
  const int w = h > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(w) * h);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != w) fail(ErrorCode::InvalidInput, "ragged image rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Image(w, h, std::move(data));
}

Kernel::Kernel(int size, std::vector<double> coeffs)
    : Kernel(size, std::move(coeffs),
             std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(size, 0)) *
                                           std::max(size, 0),
                                       1)) {}

Kernel::Kernel(int size, std::vector<double> coeffs, std::vector<std::uint8_t> support)
    : size_(size), coeffs_(std::move(coeffs)), support_(std::move(support)) {
  if (size < 1 || size % 2 == 0) {
    fail(ErrorCode::InvalidInput, "kernel side length must be odd, got " + std::to_string(size));
  }
  const auto n = static_cast<std::size_t>(size) * size;
  if (coeffs_.size() != n || support_.size() != n) {
    fail(ErrorCode::InvalidInput, "kernel coefficient count does not match its size");
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) fail(ErrorCode::InvalidInput, "kernel contains a non-finite value");
  }
  if (std::none_of(support_.begin(), support_.end(), [](std::uint8_t s) { return s != 0; })) {
    fail(ErrorCode::InvalidInput, "kernel has no active cells");
  }
}

Kernel Kernel::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<double> coeffs;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n) fail(ErrorCode::InvalidInput, "kernel must be square");
    coeffs.insert(coeffs.end(), row.begin(), row.end());
  }
  return Kernel(n, std::move(coeffs));
}

Kernel Kernel::transposed() const {
  std::vector<double> c(coeffs_.size());
  std::vector<std::uint8_t> s(support_.size());
  for (int r = 0; r < size_; ++r) {
    for (int k = 0; k < size_; ++k) {
      c[static_cast<std::size_t>(k) * size_ + r] = coeffs_[static_cast<std::size_t>(r) * size_ + k];
      s[static_cast<std::size_t>(k) * size_ + r] = support_[static_cast<std::size_t>(r) * size_ + k];
    }
  }
  return Kernel(size_, std::move(c), std::move(s));
}

Kernel Kernel::negated() const {
  std::vector<double> c(coeffs_);
  for (double& v : c) v = -v;
  return Kernel(size_, std::move(c), support_);
}

EdgeMap::EdgeMap(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

std::size_t EdgeMap::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Image EdgeMap::to_image() const {
  Image out(width_, height_);
  auto px = out.pixels();
  for (std::size_t i = 0; i < bits_.size(); ++i) px[i] = bits_[i] ? 1.0 : 0.0;
  return out;
}

EdgeMap EdgeMap::from_image(const Image& img, double threshold) {
  EdgeMap out(img.width(), img.height());
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) out.bits_[i] = px[i] >= threshold ? 1 : 0;
  return out;
}

Image to_grayscale(const ColorImage& rgb) {
  if (rgb.channels != 3) {
    fail(ErrorCode::InvalidInput,
         "grayscale conversion expects 3 channels, got " + std::to_string(rgb.channels));
  }
  if (rgb.data.size() != static_cast<std::size_t>(rgb.width) * rgb.height * 3) {
    fail(ErrorCode::InvalidInput, "colour buffer length does not match image dimensions");
  }
  Image out(rgb.width, rgb.height);
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double* p = &rgb.data[i * 3];
    px[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return out;
}

Image pad(const Image& img, int margin, PaddingMode mode) {
  if (margin < 0) fail(ErrorCode::InvalidInput, "padding margin must be non-negative");
  const int w = img.width() + 2 * margin;
  const int h = img.height() + 2 * margin;
  Image out(w, h, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int sr = r - margin;
      const int sc = c - margin;
      const bool inside = sr >= 0 && sr < img.height() && sc >= 0 && sc < img.width();
      if (inside) {
        out(r, c) = img(sr, sc);
      } else if (mode == PaddingMode::Replicate) {
        out(r, c) = img(clamp_index(sr, img.height()), clamp_index(sc, img.width()));
      }
    }
  }
  return out;
}

Image crop(const Image& img, int margin) {
  if (margin < 0 || 2 * margin >= img.width() || 2 * margin >= img.height()) {
    fail(ErrorCode::InvalidInput, "crop margin leaves no pixels");
  }
  Image out(img.width() - 2 * margin, img.height() - 2 * margin);
  for (int r = 0; r < out.height(); ++r)
    for (int c = 0; c < out.width(); ++c) out(r, c) = img(r + margin, c + margin);
  return out;
}

Image resize(const Image& img, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    fail(ErrorCode::InvalidInput, "resize factor must be positive");
  }
  const auto w = static_cast<int>(std::lround(img.width() * factor));
  const auto h = static_cast<int>(std::lround(img.height() * factor));
  if (w < 1 || h < 1) fail(ErrorCode::InvalidInput, "resize factor collapses the image");
  return resize_to(img, w, h);
}

Image resize_to(const Image& img, int width, int height) {
  check_dims(width, height);
  if (width == img.width() && height == img.height()) return img;

  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  Image out(width, height);
  for (int r = 0; r < height; ++r) {
    const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double ty = fy - y0;
    for (int c = 0; c < width; ++c) {
      const double fx = std::clamp((c + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double tx = fx - x0;
      // a + t (b - a) keeps constant regions exactly constant.
      const double top = img(y0, x0) + tx * (img(y0, x1) - img(y0, x0));
      const double bottom = img(y1, x0) + tx * (img(y1, x1) - img(y1, x0));
      out(r, c) = top + ty * (bottom - top);
    }
  }
  return out;
}

Range value_range(const Image& img) {
  auto px = img.pixels();
  const auto [lo, hi] = std::minmax_element(px.begin(), px.end());
  return {*lo, *hi};
}

Image normalize(const Image& img) {
  const Range r = value_range(img);
  Image out(img.width(), img.height(), 0.0);
  const double span = r.max - r.min;
  if (!(span > 0.0)) return out;
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] - r.min) / span;
  return out;
}

Image transpose(const Image& img) {
  Image out(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) out(c, r) = img(r, c);
  return out;
}

Image gaussian_blur(const Image& img, double sigma) {
  if (!(sigma > 0.0)) return img;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  for (int i = -radius; i <= radius; ++i) w[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;

  // Accumulate deviations from the centre pixel so flat regions stay exact.
  Image tmp(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      const double centre = img(r, c);
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += w[i + radius] * (img(r, clamp_index(c + i, img.width())) - centre);
      tmp(r, c) = centre + acc;
    }
  }
  Image out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      const double centre = tmp(r, c);
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += w[i + radius] * (tmp(clamp_index(r + i, img.height()), c) - centre);
      out(r, c) = centre + acc;
    }
  }
  return out;
}

Image box_mean(const Image& img, int window) {
  if (window < 1 || window % 2 == 0) fail(ErrorCode::InvalidInput, "window must be odd");
  const int half = window / 2;
  const double n = static_cast<double>(window) * window;
  Image out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      const double centre = img(r, c);
      double acc = 0.0;
      for (int dr = -half; dr <= half; ++dr) {
        const int rr = clamp_index(r + dr, img.height());
        for (int dc = -half; dc <= half; ++dc)
          acc += img(rr, clamp_index(c + dc, img.width())) - centre;
      }
      out(r, c) = centre + acc / n;
    }
  }
  return out;
}

}  // namespace tropedge
