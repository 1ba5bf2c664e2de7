#include "tropedge/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tropedge/tropical.hpp"

namespace tropedge {

namespace {

Kernel embed_roberts(double a, double b, double c, double d) {
  // [a b; c d] with a on the anchor.
  return Kernel(3, {0, 0, 0, 0, a, b, 0, c, d}, {0, 0, 0, 0, 1, 1, 0, 1, 1});
}

Image elementwise_min(const Image& a, const Image& b) {
  Image out = a;
  auto dst = out.pixels();
  auto src = b.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::min(dst[i], src[i]);
  return out;
}

/// min over kernels of (min-plus response - I), i.e. the strongest weighted drop.
Image tropical_drop(const Image& img, const std::vector<Kernel>& kernels) {
  Image drop = tropical_convolve(img, kernels.front(), Semiring::MinPlus);
  for (std::size_t k = 1; k < kernels.size(); ++k)
    drop = elementwise_min(drop, tropical_convolve(img, kernels[k], Semiring::MinPlus));
  auto d = drop.pixels();
  auto src = img.pixels();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= src[i];
  return drop;
}

Image inverted_normalized(Image img) {
  for (double& v : img.pixels()) v = -v;
  return normalize(img);
}

Image constant_like(const Image& img, double value) { return Image(img.width(), img.height(), value); }

}  // namespace

void CannyParams::validate() const {
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidInput, "canny sigma must be positive");
  if (!(low >= 0.0 && low < high && high <= 1.0)) {
    fail(ErrorCode::InvalidInput, "canny thresholds must satisfy 0 <= low < high <= 1");
  }
}

std::pair<Kernel, Kernel> gradient_kernels(GradientOperator op) {
  switch (op) {
    case GradientOperator::Roberts:
      return {embed_roberts(1, 0, 0, -1), embed_roberts(0, 1, -1, 0)};
    case GradientOperator::Prewitt:
      return {Kernel::from_rows({{1, 1, 1}, {0, 0, 0}, {-1, -1, -1}}),
              Kernel::from_rows({{-1, 0, 1}, {-1, 0, 1}, {-1, 0, 1}})};
    case GradientOperator::Sobel: {
      Kernel sx = Kernel::from_rows({{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}});
      Kernel sy = sx.transposed();
      return {std::move(sx), std::move(sy)};
    }
  }
  fail(ErrorCode::InvalidInput, "unknown gradient operator");
}

GradientPair classical_gradient(const Image& img, GradientOperator op) {
  const auto [kx, ky] = gradient_kernels(op);
  return {classical_convolve(img, kx), classical_convolve(img, ky)};
}

Image gradient_magnitude(const GradientPair& g) {
  if (!g.gx.same_shape(g.gy)) fail(ErrorCode::InvalidInput, "gradient components differ in size");
  Image out(g.gx.width(), g.gx.height());
  auto dst = out.pixels();
  auto x = g.gx.pixels();
  auto y = g.gy.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::hypot(x[i], y[i]);
  return out;
}

Kernel log_kernel(double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidInput, "LoG sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const int side = 2 * radius + 1;
  const double s2 = sigma * sigma;
  std::vector<double> k(static_cast<std::size_t>(side) * side);
  double sum = 0.0;
  for (int r = -radius; r <= radius; ++r) {
    for (int c = -radius; c <= radius; ++c) {
      const double q = (r * r + c * c) / (2.0 * s2);
      const double v = -1.0 / (std::numbers::pi * s2 * s2) * (1.0 - q) * std::exp(-q);
      k[(r + radius) * side + (c + radius)] = v;
      sum += v;
    }
  }
  const double mean = sum / static_cast<double>(k.size());
  for (double& v : k) v -= mean;
  return Kernel(side, std::move(k));
}

Image log_detect(const Image& img, double sigma, double contrast_floor) {
  const Image resp = classical_convolve(img, log_kernel(sigma));
  Image out = constant_like(img, 0.0);
  const int h = img.height();
  const int w = img.width();
  auto mark = [&](int r0, int c0, int r1, int c1) {
    const double a = resp(r0, c0);
    const double b = resp(r1, c1);
    if (!((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0))) return;
    if (std::abs(a - b) <= contrast_floor) return;
    if (std::abs(a) <= std::abs(b)) {
      out(r0, c0) = 1.0;
    } else {
      out(r1, c1) = 1.0;
    }
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (c + 1 < w) mark(r, c, r, c + 1);
      if (r + 1 < h) mark(r, c, r + 1, c);
    }
  }
  return out;
}

Image non_max_suppression(const Image& response, const GradientPair& direction) {
  if (!response.same_shape(direction.gx) || !response.same_shape(direction.gy)) {
    fail(ErrorCode::InvalidInput, "NMS direction does not match the response");
  }
  const int h = response.height();
  const int w = response.width();
  Image out = constant_like(response, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double v = response(r, c);
      if (!(v > 0.0)) continue;
      double angle = std::atan2(direction.gx(r, c), direction.gy(r, c)) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      int dr = 0;
      int dc = 1;
      if (angle >= 22.5 && angle < 67.5) {
        dr = 1;
        dc = 1;
      } else if (angle >= 67.5 && angle < 112.5) {
        dr = 1;
        dc = 0;
      } else if (angle >= 112.5 && angle < 157.5) {
        dr = 1;
        dc = -1;
      }
      auto sample = [&](int rr, int cc) {
        return (rr < 0 || rr >= h || cc < 0 || cc >= w) ? 0.0 : response(rr, cc);
      };
      const double behind = sample(r - dr, c - dc);
      const double ahead = sample(r + dr, c + dc);
      if (v > behind && v >= ahead) out(r, c) = v;
    }
  }
  return out;
}

EdgeMap hysteresis(const Image& response, const Image& low, const Image& high) {
  if (!response.same_shape(low) || !response.same_shape(high)) {
    fail(ErrorCode::InvalidInput, "hysteresis thresholds do not match the response");
  }
  const int h = response.height();
  const int w = response.width();
  EdgeMap out(w, h);
  std::vector<std::pair<int, int>> queue;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double v = response(r, c);
      if (v > 0.0 && v >= high(r, c)) {
        out.set(r, c, true);
        queue.emplace_back(r, c);
      }
    }
  }
  while (!queue.empty()) {
    const auto [r, c] = queue.back();
    queue.pop_back();
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const int nr = r + dr;
        const int nc = c + dc;
        if (nr < 0 || nr >= h || nc < 0 || nc >= w || out(nr, nc)) continue;
        const double v = response(nr, nc);
        if (v > 0.0 && v >= low(nr, nc)) {
          out.set(nr, nc, true);
          queue.emplace_back(nr, nc);
        }
      }
    }
  }
  return out;
}

EdgeMap canny_detect(const Image& img, const CannyParams& params) {
  params.validate();
  const Image smoothed = gaussian_blur(img, params.sigma);
  const GradientPair g = classical_gradient(smoothed, GradientOperator::Sobel);
  Image mag = gradient_magnitude(g);
  const double peak = value_range(mag).max;
  if (!(peak > 0.0)) return EdgeMap(img.width(), img.height());
  for (double& v : mag.pixels()) v /= peak;
  const Image thin_mag = non_max_suppression(mag, g);
  return hysteresis(thin_mag, constant_like(img, params.low), constant_like(img, params.high));
}

Image tg_gradient_detect(const Image& img, GradientOperator op) {
  const auto [kx, ky] = gradient_kernels(op);
  return inverted_normalized(tropical_drop(img, {kx, kx.negated(), ky, ky.negated()}));
}

Image tg_log_detect(const Image& img, double sigma) {
  return inverted_normalized(tropical_drop(img, {log_kernel(sigma)}));
}

Image tropical_smooth(const Image& img, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidInput, "smoothing sigma must be positive");
  const int radius = std::max(1, static_cast<int>(std::ceil(sigma)));
  const int side = 2 * radius + 1;
  std::vector<double> cone(static_cast<std::size_t>(side) * side);
  for (int r = -radius; r <= radius; ++r)
    for (int c = -radius; c <= radius; ++c)
      cone[(r + radius) * side + (c + radius)] = kTropicalConeSlope * std::hypot(r, c);
  return tropical_convolve(img, Kernel(side, std::move(cone)), Semiring::MinPlus);
}

TropicalCannyStages tg_canny_stages(const Image& img, const CannyParams& canny,
                                    const ThresholdParams& threshold) {
  canny.validate();
  threshold.validate();
  TropicalCannyStages s;
  s.smoothed = tropical_smooth(img, canny.sigma);
  s.strength = tg_gradient_detect(s.smoothed, GradientOperator::Sobel);
  s.suppressed = non_max_suppression(s.strength, classical_gradient(s.smoothed, GradientOperator::Sobel));
  s.high = box_mean(s.strength, threshold.window);
  for (double& v : s.high.pixels()) v += threshold.offset;
  s.low = s.high;
  for (double& v : s.low.pixels()) v *= kAdaptiveLowRatio;
  s.edges = hysteresis(s.suppressed, s.low, s.high);
  return s;
}

EdgeMap tg_canny_detect(const Image& img, const CannyParams& canny, const ThresholdParams& threshold) {
  return tg_canny_stages(img, canny, threshold).edges;
}

}  // namespace tropedge
