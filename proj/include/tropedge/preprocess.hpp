#pragma once

#include <utility>
#include <vector>

#include "tropedge/image.hpp"

namespace tropedge {

struct BilateralParams {
  double sigma_spatial = 2.0;  // pixels
  double sigma_range = 0.1;    // intensity units
  int radius = 3;              // 1..7

  void validate() const;
  bool operator==(const BilateralParams&) const = default;
};

struct ShockParams {
  double lambda = 0.3;  // [0, 1]
  int iterations = 5;   // 1..50

  void validate() const;
  bool operator==(const ShockParams&) const = default;
};

struct ScalePair {
  double small = 0.5;  // (0, 1)
  double large = 1.5;  // > 1

  void validate() const;
  bool operator==(const ScalePair&) const = default;
};

/// Gaussian range x Gaussian spatial weighted mean, replicate borders.
Image bilateral_filter(const Image& img, const BilateralParams& params);

/// Iterative shock filter. Each step moves a pixel by lambda * |grad I| toward
/// the plateau picked by the sign of the Laplacian of a lightly smoothed copy
/// (erosion where the Laplacian is positive, dilation where negative), using
/// upwind differences. Results are clamped to [0,1] when the input lies there.
Image shock_filter(const Image& img, const ShockParams& params);

/// (resize(img, small), resize(img, large))
std::pair<Image, Image> make_scale_pair(const Image& img, const ScalePair& scales);

/// Resizes every response to width x height and keeps the element-wise max.
Image merge_scales(const std::vector<Image>& responses, int width, int height);

}  // namespace tropedge
