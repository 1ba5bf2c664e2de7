#pragma once

#include <cstddef>

#include "tropedge/image.hpp"

namespace tropedge {

/// Per-pixel eigenvalues of the 2x2 Hessian, |lambda1| >= |lambda2|.
struct HessianResponse {
  Image lambda1;
  Image lambda2;
};

enum class ThresholdMode { AdaptiveMean, GlobalFixed, Otsu };

struct ThresholdParams {
  ThresholdMode mode = ThresholdMode::AdaptiveMean;
  int window = 15;       // odd, >= 3 (AdaptiveMean)
  double offset = -0.02; // [-1, 1]  (AdaptiveMean)
  double value = 0.5;    // [0, 1]   (GlobalFixed)

  void validate() const;
  bool operator==(const ThresholdParams&) const = default;
};

/// Gaussian smoothing at sigma (sigma == 0 skips smoothing), then central
/// second differences with replicate borders and a closed-form symmetric 2x2
/// eigen-decomposition per pixel.
HessianResponse hessian_filter(const Image& img, double sigma);

/// Closed-form eigenvalues of [[a, b], [b, c]], ordered by magnitude.
struct Eigen2 {
  double lambda1;
  double lambda2;
};
Eigen2 symmetric_eigenvalues(double a, double b, double c);

/// |lambda1| quantile that maps to full weight in hessian_enhance.
inline constexpr double kHessianWeightQuantile = 0.99;

/// Response weighted by min(1, |lambda1| / q), with q the 0.99 quantile of
/// |lambda1| (the maximum when that quantile is 0), renormalised to [0,1].
Image hessian_enhance(const Image& edge_response, const HessianResponse& hessian);

/// |grad E| * (1 - E) with central differences. E must lie in [0,1].
Image wavelet_shrink(const Image& edge_response);

/// AdaptiveMean: edge iff E > 0 and E >= local mean + offset.
/// GlobalFixed: edge iff E >= value.
/// Otsu: edge iff the 256-bin histogram bin of E lies above Otsu's split.
EdgeMap adaptive_threshold(const Image& edge_response, const ThresholdParams& params);

/// Otsu split on a 256-bin histogram of [0,1] values; returns the highest bin
/// index that still counts as background.
int otsu_bin(const Image& img);

/// Zhang-Suen thinning to a fixed point. Pixels outside the map count as 0.
EdgeMap thin(const EdgeMap& edges);

/// Drops 8-connected components with fewer than min_pixels pixels.
EdgeMap area_filter(const EdgeMap& edges, std::size_t min_pixels);

}  // namespace tropedge
