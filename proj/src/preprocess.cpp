#include "tropedge/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tropedge {

namespace {

constexpr double kShockSignSigma = 1.0;
// |Laplacian| below this counts as zero so exactly balanced pixels stay put.
constexpr double kLaplacianDeadband = 1e-9;

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

Image laplacian(const Image& img) {
  Image out(img.width(), img.height());
  const int h = img.height();
  const int w = img.width();
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      out(r, c) = img(clamp_index(r - 1, h), c) + img(clamp_index(r + 1, h), c) +
                  img(r, clamp_index(c - 1, w)) + img(r, clamp_index(c + 1, w)) - 4.0 * img(r, c);
    }
  }
  return out;
}

}  // namespace

void BilateralParams::validate() const {
  if (!(sigma_spatial > 0.0) || !(sigma_range > 0.0)) {
    fail(ErrorCode::InvalidInput, "bilateral sigmas must be positive");
  }
  if (radius < 1 || radius > 7) fail(ErrorCode::InvalidInput, "bilateral radius must be in 1..7");
}

void ShockParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::InvalidInput, "shock lambda must be in [0,1]");
  if (iterations < 1 || iterations > 50) {
    fail(ErrorCode::InvalidInput, "shock iterations must be in 1..50");
  }
}

void ScalePair::validate() const {
  if (!(small > 0.0 && small < 1.0 && large > 1.0 && std::isfinite(large))) {
    fail(ErrorCode::InvalidInput, "scale pair must satisfy 0 < s < 1 < l");
  }
}

Image bilateral_filter(const Image& img, const BilateralParams& params) {
  params.validate();
  const int rad = params.radius;
  const int side = 2 * rad + 1;
  std::vector<double> spatial(static_cast<std::size_t>(side) * side);
  for (int dr = -rad; dr <= rad; ++dr)
    for (int dc = -rad; dc <= rad; ++dc)
      spatial[(dr + rad) * side + (dc + rad)] =
          std::exp(-(dr * dr + dc * dc) / (2.0 * params.sigma_spatial * params.sigma_spatial));
  const double range_scale = -1.0 / (2.0 * params.sigma_range * params.sigma_range);

  const int h = img.height();
  const int w = img.width();
  Image out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double centre = img(r, c);
      double acc = 0.0;
      double norm = 0.0;
      double lo = centre;
      double hi = centre;
      for (int dr = -rad; dr <= rad; ++dr) {
        const int rr = clamp_index(r + dr, h);
        for (int dc = -rad; dc <= rad; ++dc) {
          const double v = img(rr, clamp_index(c + dc, w));
          const double dv = v - centre;
          const double wt = spatial[(dr + rad) * side + (dc + rad)] * std::exp(dv * dv * range_scale);
          acc += wt * dv;
          norm += wt;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      // The centre weight is 1, so norm >= 1.
      out(r, c) = std::clamp(centre + acc / norm, lo, hi);
    }
  }
  return out;
}

Image shock_filter(const Image& img, const ShockParams& params) {
  params.validate();
  if (params.lambda == 0.0) return img;

  const Range in_range = value_range(img);
  const bool unit_range = in_range.min >= 0.0 && in_range.max <= 1.0;
  const int h = img.height();
  const int w = img.width();

  Image cur = img;
  for (int it = 0; it < params.iterations; ++it) {
    const Image lap = laplacian(gaussian_blur(cur, kShockSignSigma));
    Image next(w, h);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const double v = cur(r, c);
        const double l = lap(r, c);
        if (std::abs(l) <= kLaplacianDeadband) {
          next(r, c) = v;
          continue;
        }
        const double bx = v - cur(r, clamp_index(c - 1, w));
        const double fx = cur(r, clamp_index(c + 1, w)) - v;
        const double by = v - cur(clamp_index(r - 1, h), c);
        const double fy = cur(clamp_index(r + 1, h), c) - v;
        double g2;
        if (l > 0.0) {
          // Erosion: pull toward the lower neighbours.
          g2 = std::pow(std::max(bx, 0.0), 2) + std::pow(std::min(fx, 0.0), 2) +
               std::pow(std::max(by, 0.0), 2) + std::pow(std::min(fy, 0.0), 2);
          next(r, c) = v - params.lambda * std::sqrt(g2);
        } else {
          g2 = std::pow(std::min(bx, 0.0), 2) + std::pow(std::max(fx, 0.0), 2) +
               std::pow(std::min(by, 0.0), 2) + std::pow(std::max(fy, 0.0), 2);
          next(r, c) = v + params.lambda * std::sqrt(g2);
        }
        if (unit_range) next(r, c) = std::clamp(next(r, c), 0.0, 1.0);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::pair<Image, Image> make_scale_pair(const Image& img, const ScalePair& scales) {
  scales.validate();
  return {resize(img, scales.small), resize(img, scales.large)};
}

Image merge_scales(const std::vector<Image>& responses, int width, int height) {
  if (responses.empty()) fail(ErrorCode::InvalidInput, "merge_scales needs at least one response");
  Image merged = resize_to(responses.front(), width, height);
  for (std::size_t i = 1; i < responses.size(); ++i) {
    const Image r = resize_to(responses[i], width, height);
    auto dst = merged.pixels();
    auto src = r.pixels();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = std::max(dst[k], src[k]);
  }
  return merged;
}

}  // namespace tropedge
