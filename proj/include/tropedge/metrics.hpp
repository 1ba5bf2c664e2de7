#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tropedge/image.hpp"

namespace tropedge {

/// Pixel displacement (row, col) between the two members of a pair.
/// (0, 1) pairs each pixel with its right-hand neighbour.
struct GlcmOffset {
  int drow = 0;
  int dcol = 1;
  bool operator==(const GlcmOffset&) const = default;
};

/// Normalised gray-level co-occurrence matrix, P(i, j) stored row-major.
struct Glcm {
  int levels = 0;
  GlcmOffset offset;
  std::vector<double> p;

  double operator()(int i, int j) const noexcept {
    return p[static_cast<std::size_t>(i) * levels + j];
  }
};

/// Quantises [0,1] intensities into `levels` uniform bins (1.0 lands in the
/// top bin) and counts ordered pairs (I(r,c), I(r+drow, c+dcol)). Not
/// symmetrised.
Glcm glcm(const Image& img, int levels = 8, GlcmOffset offset = {});

struct GlcmStats {
  double contrast = 0.0;
  double correlation = 0.0;
  double energy = 0.0;
  double entropy = 0.0;  // bits
  double homogeneity = 0.0;
  /// False when a marginal has zero variance; correlation is then 1.0.
  bool correlation_defined = true;
};

GlcmStats glcm_stats(const Glcm& g);

/// std(original over edge pixels) / std(original over the rest). Empty
/// when the map is empty or full, or the background deviation is zero.
std::optional<double> contrast_ratio(const Image& img, const EdgeMap& edges);

/// Pearson correlation over all pixels; empty when either side is flat.
std::optional<double> reference_correlation(const Image& edges, const Image& reference);

inline constexpr double kEmeFloor = 1.0 / 255.0;

/// Mean over block_rows x block_cols tiles (partial tiles included) of
/// 20 log10(max / min), both floored at 1/255.
double eme(const Image& img, int block_rows = 8, int block_cols = 8);

using ParamList = std::vector<std::pair<std::string, std::string>>;

struct MetricsReport {
  std::string image;
  std::string method;
  GlcmStats original;
  GlcmStats edge;
  std::optional<double> contrast_ratio;
  double eme = 0.0;
  ParamList params;
};

struct MetricsConfig {
  int glcm_levels = 8;
  GlcmOffset glcm_offset;
  int eme_block = 8;
  bool operator==(const MetricsConfig&) const = default;
};

/// GLCM statistics for both images, contrast ratio of the original over the
/// edge map, and EME of the edge map.
MetricsReport compute_report(const Image& original, const EdgeMap& edges, const MetricsConfig& config);

/// Fixed CSV column order shared by every report writer.
const std::vector<std::string>& report_columns();

/// RFC 4180 rows; `extra` columns (e.g. timings) are appended after params.
std::string report_csv_header(const std::vector<std::string>& extra = {});
std::string report_csv_row(const MetricsReport& r, const std::vector<std::string>& extra = {});

using NumericFields = std::vector<std::pair<std::string, double>>;

/// JSON array of report objects; `extra` adds numeric fields to each object in order.
std::string reports_json(const std::vector<MetricsReport>& reports,
                         const std::vector<NumericFields>& extra = {});

}  // namespace tropedge
