#pragma once

#include <utility>

#include "tropedge/enhance.hpp"
#include "tropedge/image.hpp"

namespace tropedge {

enum class GradientOperator { Roberts, Prewitt, Sobel };

/// Directional responses; gx is the response to the "x" kernel as printed
/// (for Prewitt and Sobel that kernel differentiates across rows).
struct GradientPair {
  Image gx;
  Image gy;
};

struct CannyParams {
  double sigma = 1.0;
  double low = 0.1;   // fraction of the peak gradient magnitude
  double high = 0.2;

  void validate() const;
  bool operator==(const CannyParams&) const = default;
};

/// (x kernel, y kernel). Roberts' 2x2 masks sit in the lower-right quadrant of
/// a 3x3 frame with the upper-left cell of the mask on the anchor.
std::pair<Kernel, Kernel> gradient_kernels(GradientOperator op);

GradientPair classical_gradient(const Image& img, GradientOperator op);
Image gradient_magnitude(const GradientPair& g);

/// Discrete Laplacian of Gaussian, side 2*ceil(3 sigma)+1, shifted to sum 0.
Kernel log_kernel(double sigma);

/// LoG response zero crossings. A crossing between horizontally or vertically
/// adjacent pixels with |r(p) - r(q)| > contrast_floor marks the pixel with the
/// smaller |r|. Returns a 0/1 image.
Image log_detect(const Image& img, double sigma, double contrast_floor = 0.01);

/// Non-maximum suppression along the gradient direction (gx across rows, gy
/// across columns) quantised to 0/45/90/135 degrees. A pixel survives when its
/// response is positive, strictly greater than the neighbour behind it and no
/// smaller than the neighbour ahead; the asymmetry keeps one of two equal
/// ridge pixels.
Image non_max_suppression(const Image& response, const GradientPair& direction);

/// Pixels >= high seed 8-connected growth through pixels >= low. Thresholds
/// are per-pixel images so adaptive schemes can share the routine.
EdgeMap hysteresis(const Image& response, const Image& low, const Image& high);

EdgeMap canny_detect(const Image& img, const CannyParams& params);

/// Min-plus gradient strength. For each kernel K of the operator (and its
/// negation), the min-plus response minus the pixel itself is the weighted
/// drop toward the darkest neighbour. The most negative drop is inverted and
/// normalised, so stronger edges are brighter.
Image tg_gradient_detect(const Image& img, GradientOperator op);

/// Min-plus LoG strength: the LoG kernel applied over (min, +), referenced to
/// the pixel, inverted and normalised.
Image tg_log_detect(const Image& img, double sigma);

/// Structure-preserving min-plus cone smoothing (coefficient 0.05 per pixel
/// of distance, radius max(1, ceil(sigma))).
Image tropical_smooth(const Image& img, double sigma);

/// Four stages: min-plus cone smoothing, min-plus Sobel strength, NMS on that
/// strength, hysteresis with high = local mean (threshold window) + offset and
/// low = 0.4 * high.
EdgeMap tg_canny_detect(const Image& img, const CannyParams& canny, const ThresholdParams& threshold);

/// Intermediate stages of tg_canny_detect, exposed for inspection.
struct TropicalCannyStages {
  Image smoothed;
  Image strength;
  Image suppressed;
  Image high;
  Image low;
  EdgeMap edges;
};
TropicalCannyStages tg_canny_stages(const Image& img, const CannyParams& canny,
                                    const ThresholdParams& threshold);

inline constexpr double kTropicalConeSlope = 0.05;
inline constexpr double kAdaptiveLowRatio = 0.4;
/// Default offset of the tg-canny local-mean high threshold.
inline constexpr double kTropicalCannyOffset = 0.1;

}  // namespace tropedge
