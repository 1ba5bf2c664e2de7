#include "tropedge/enhance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "tropedge/components.hpp"

namespace tropedge {

namespace {

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

constexpr int kHistogramBins = 256;

int histogram_bin(double v) {
  return std::clamp(static_cast<int>(std::floor(v * kHistogramBins)), 0, kHistogramBins - 1);
}

}  // namespace

void ThresholdParams::validate() const {
  if (window < 3 || window % 2 == 0) fail(ErrorCode::InvalidInput, "threshold window must be odd and >= 3");
  if (!(offset >= -1.0 && offset <= 1.0)) fail(ErrorCode::InvalidInput, "threshold offset must be in [-1,1]");
  if (!(value >= 0.0 && value <= 1.0)) fail(ErrorCode::InvalidInput, "fixed threshold must be in [0,1]");
}

Eigen2 symmetric_eigenvalues(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double hi = mean + radius;
  const double lo = mean - radius;
  return std::abs(hi) >= std::abs(lo) ? Eigen2{hi, lo} : Eigen2{lo, hi};
}

HessianResponse hessian_filter(const Image& img, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    fail(ErrorCode::InvalidInput, "hessian sigma must be non-negative");
  }
  const Image s = gaussian_blur(img, sigma);
  const int h = s.height();
  const int w = s.width();
  HessianResponse out{Image(w, h), Image(w, h)};
  for (int r = 0; r < h; ++r) {
    const int up = clamp_index(r - 1, h);
    const int dn = clamp_index(r + 1, h);
    for (int c = 0; c < w; ++c) {
      const int lf = clamp_index(c - 1, w);
      const int rt = clamp_index(c + 1, w);
      const double v = s(r, c);
      const double dxx = s(r, rt) - 2.0 * v + s(r, lf);
      const double dyy = s(dn, c) - 2.0 * v + s(up, c);
      const double dxy = 0.25 * (s(dn, rt) - s(dn, lf) - s(up, rt) + s(up, lf));
      const Eigen2 e = symmetric_eigenvalues(dxx, dxy, dyy);
      out.lambda1(r, c) = e.lambda1;
      out.lambda2(r, c) = e.lambda2;
    }
  }
  return out;
}

Image hessian_enhance(const Image& edge_response, const HessianResponse& hessian) {
  if (!edge_response.same_shape(hessian.lambda1) || !edge_response.same_shape(hessian.lambda2)) {
    fail(ErrorCode::InvalidInput, "hessian response does not match the edge response");
  }
  std::vector<double> mags;
  mags.reserve(hessian.lambda1.size());
  for (double v : hessian.lambda1.pixels()) mags.push_back(std::abs(v));
  const auto rank = static_cast<std::ptrdiff_t>(kHessianWeightQuantile * static_cast<double>(mags.size() - 1));
  std::nth_element(mags.begin(), mags.begin() + rank, mags.end());
  double peak = mags[static_cast<std::size_t>(rank)];
  if (peak == 0.0) peak = *std::max_element(mags.begin() + rank, mags.end());
  Image out(edge_response.width(), edge_response.height(), 0.0);
  if (peak == 0.0) return out;
  auto dst = out.pixels();
  auto src = edge_response.pixels();
  auto l1 = hessian.lambda1.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] * std::min(1.0, std::abs(l1[i]) / peak);
  return normalize(out);
}

Image wavelet_shrink(const Image& edge_response) {
  const Range r = value_range(edge_response);
  if (r.min < 0.0 || r.max > 1.0) {
    fail(ErrorCode::InvalidInput, "wavelet_shrink expects a response normalised to [0,1]");
  }
  const int h = edge_response.height();
  const int w = edge_response.width();
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = 0.5 * (edge_response(y, clamp_index(x + 1, w)) -
                               edge_response(y, clamp_index(x - 1, w)));
      const double gy = 0.5 * (edge_response(clamp_index(y + 1, h), x) -
                               edge_response(clamp_index(y - 1, h), x));
      out(y, x) = std::hypot(gx, gy) * (1.0 - edge_response(y, x));
    }
  }
  return out;
}

int otsu_bin(const Image& img) {
  std::array<double, kHistogramBins> hist{};
  for (double v : img.pixels()) hist[histogram_bin(v)] += 1.0;
  const double total = static_cast<double>(img.size());
  double sum_all = 0.0;
  for (int i = 0; i < kHistogramBins; ++i) sum_all += i * hist[i];

  double weight_bg = 0.0;
  double sum_bg = 0.0;
  double best = -1.0;
  int split = 0;
  for (int t = 0; t < kHistogramBins; ++t) {
    weight_bg += hist[t];
    if (weight_bg == 0.0) continue;
    const double weight_fg = total - weight_bg;
    if (weight_fg == 0.0) break;
    sum_bg += t * hist[t];
    const double mean_bg = sum_bg / weight_bg;
    const double mean_fg = (sum_all - sum_bg) / weight_fg;
    const double between = weight_bg * weight_fg * (mean_bg - mean_fg) * (mean_bg - mean_fg);
    if (between > best) {
      best = between;
      split = t;
    }
  }
  if (best < 0.0) {
    // Single populated bin: everything is background.
    split = kHistogramBins - 1;
  }
  return split;
}

EdgeMap adaptive_threshold(const Image& edge_response, const ThresholdParams& params) {
  params.validate();
  EdgeMap out(edge_response.width(), edge_response.height());
  switch (params.mode) {
    case ThresholdMode::GlobalFixed:
      for (int r = 0; r < edge_response.height(); ++r)
        for (int c = 0; c < edge_response.width(); ++c)
          out.set(r, c, edge_response(r, c) >= params.value);
      break;
    case ThresholdMode::Otsu: {
      const int split = otsu_bin(edge_response);
      for (int r = 0; r < edge_response.height(); ++r)
        for (int c = 0; c < edge_response.width(); ++c)
          out.set(r, c, histogram_bin(edge_response(r, c)) > split);
      break;
    }
    case ThresholdMode::AdaptiveMean: {
      const Image mean = box_mean(edge_response, params.window);
      for (int r = 0; r < edge_response.height(); ++r) {
        for (int c = 0; c < edge_response.width(); ++c) {
          const double e = edge_response(r, c);
          out.set(r, c, e > 0.0 && e >= mean(r, c) + params.offset);
        }
      }
      break;
    }
  }
  return out;
}

EdgeMap thin(const EdgeMap& edges) {
  const int h = edges.height();
  const int w = edges.width();
  EdgeMap cur = edges;
  auto at = [&](int r, int c) -> int {
    return (r >= 0 && r < h && c >= 0 && c < w && cur(r, c)) ? 1 : 0;
  };

  std::vector<std::pair<int, int>> doomed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      doomed.clear();
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          if (!cur(r, c)) continue;
          // P2..P9 clockwise from north.
          const int p[8] = {at(r - 1, c), at(r - 1, c + 1), at(r, c + 1), at(r + 1, c + 1),
                            at(r + 1, c), at(r + 1, c - 1), at(r, c - 1), at(r - 1, c - 1)};
          int neighbours = 0;
          int transitions = 0;
          for (int k = 0; k < 8; ++k) {
            neighbours += p[k];
            if (p[k] == 0 && p[(k + 1) % 8] == 1) ++transitions;
          }
          if (neighbours < 2 || neighbours > 6 || transitions != 1) continue;
          const bool ok = pass == 0 ? (p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0)
                                    : (p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0);
          if (ok) doomed.emplace_back(r, c);
        }
      }
      for (auto [r, c] : doomed) cur.set(r, c, false);
      changed = changed || !doomed.empty();
    }
  }
  return cur;
}

EdgeMap area_filter(const EdgeMap& edges, std::size_t min_pixels) {
  if (min_pixels == 0) return edges;
  const Components comps = label_components(edges);
  EdgeMap out(edges.width(), edges.height());
  for (int r = 0; r < edges.height(); ++r) {
    for (int c = 0; c < edges.width(); ++c) {
      const int label = comps.label(r, c);
      if (label >= 0 && comps.sizes[label] >= min_pixels) out.set(r, c, true);
    }
  }
  return out;
}

}  // namespace tropedge
