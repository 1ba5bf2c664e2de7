#include "tropedge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace tropedge {

namespace {

int quantize(double v, int levels) {
  return std::clamp(static_cast<int>(std::floor(v * levels)), 0, levels - 1);
}

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};

template <typename Pred>
Moments moments_where(const Image& img, const EdgeMap& edges, Pred keep) {
  Moments m;
  double sum = 0.0;
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      if (keep(edges(r, c))) {
        sum += img(r, c);
        ++m.n;
      }
  if (m.n == 0) return m;
  m.mean = sum / static_cast<double>(m.n);
  double ss = 0.0;
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      if (keep(edges(r, c))) ss += (img(r, c) - m.mean) * (img(r, c) - m.mean);
  m.stddev = std::sqrt(ss / static_cast<double>(m.n));
  return m;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string params_field(const ParamList& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += ';';
    out += k + '=' + v;
  }
  return out;
}

}  // namespace

Glcm glcm(const Image& img, int levels, GlcmOffset offset) {
  if (levels < 2) fail(ErrorCode::InvalidInput, "GLCM needs at least 2 levels");
  if (offset.drow == 0 && offset.dcol == 0) fail(ErrorCode::InvalidInput, "GLCM offset must be nonzero");
  const int r0 = std::max(0, -offset.drow);
  const int r1 = std::min(img.height(), img.height() - offset.drow);
  const int c0 = std::max(0, -offset.dcol);
  const int c1 = std::min(img.width(), img.width() - offset.dcol);
  if (r0 >= r1 || c0 >= c1) fail(ErrorCode::InvalidInput, "image is smaller than the GLCM offset span");

  Glcm g{levels, offset, std::vector<double>(static_cast<std::size_t>(levels) * levels, 0.0)};
  std::size_t pairs = 0;
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) {
      const int a = quantize(img(r, c), levels);
      const int b = quantize(img(r + offset.drow, c + offset.dcol), levels);
      g.p[static_cast<std::size_t>(a) * levels + b] += 1.0;
      ++pairs;
    }
  }
  for (double& v : g.p) v /= static_cast<double>(pairs);
  return g;
}

GlcmStats glcm_stats(const Glcm& g) {
  GlcmStats s;
  double mu_i = 0.0;
  double mu_j = 0.0;
  for (int i = 0; i < g.levels; ++i) {
    for (int j = 0; j < g.levels; ++j) {
      const double p = g(i, j);
      mu_i += i * p;
      mu_j += j * p;
      s.contrast += static_cast<double>((i - j) * (i - j)) * p;
      s.energy += p * p;
      if (p > 0.0) s.entropy -= p * std::log2(p);
      s.homogeneity += p / (1.0 + std::abs(i - j));
    }
  }
  double var_i = 0.0;
  double var_j = 0.0;
  double cov = 0.0;
  for (int i = 0; i < g.levels; ++i) {
    for (int j = 0; j < g.levels; ++j) {
      const double p = g(i, j);
      var_i += (i - mu_i) * (i - mu_i) * p;
      var_j += (j - mu_j) * (j - mu_j) * p;
      cov += (i - mu_i) * (j - mu_j) * p;
    }
  }
  constexpr double kFlatVariance = 1e-12;
  if (var_i > kFlatVariance && var_j > kFlatVariance) {
    s.correlation = cov / std::sqrt(var_i * var_j);
  } else {
    s.correlation = 1.0;
    s.correlation_defined = false;
  }
  return s;
}

std::optional<double> contrast_ratio(const Image& img, const EdgeMap& edges) {
  if (!edges.same_shape(img)) fail(ErrorCode::DimensionMismatch, "edge map does not match the image");
  const Moments on = moments_where(img, edges, [](bool e) { return e; });
  const Moments off = moments_where(img, edges, [](bool e) { return !e; });
  if (on.n == 0 || off.n == 0 || !(off.stddev > 0.0)) return std::nullopt;
  return on.stddev / off.stddev;
}

std::optional<double> reference_correlation(const Image& edges, const Image& reference) {
  if (!edges.same_shape(reference)) fail(ErrorCode::DimensionMismatch, "images differ in size");
  const auto a = edges.pixels();
  const auto b = reference.pixels();
  const double n = static_cast<double>(a.size());
  // Deviations are taken from the first pixel so constant images stay exact.
  const double a0 = a[0];
  const double b0 = b[0];
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] - a0;
    mb += b[i] - b0;
  }
  ma /= n;
  mb /= n;
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = (a[i] - a0) - ma;
    const double y = (b[i] - b0) - mb;
    cov += x * y;
    va += x * x;
    vb += y * y;
  }
  if (!(va > 0.0) || !(vb > 0.0)) return std::nullopt;
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

double eme(const Image& img, int block_rows, int block_cols) {
  if (block_rows < 1 || block_cols < 1) fail(ErrorCode::InvalidInput, "EME block must be at least 1x1");
  double total = 0.0;
  std::size_t blocks = 0;
  for (int r0 = 0; r0 < img.height(); r0 += block_rows) {
    for (int c0 = 0; c0 < img.width(); c0 += block_cols) {
      double lo = img(r0, c0);
      double hi = lo;
      for (int r = r0; r < std::min(r0 + block_rows, img.height()); ++r) {
        for (int c = c0; c < std::min(c0 + block_cols, img.width()); ++c) {
          lo = std::min(lo, img(r, c));
          hi = std::max(hi, img(r, c));
        }
      }
      total += 20.0 * std::log10(std::max(hi, kEmeFloor) / std::max(lo, kEmeFloor));
      ++blocks;
    }
  }
  return total / static_cast<double>(blocks);
}

MetricsReport compute_report(const Image& original, const EdgeMap& edges, const MetricsConfig& config) {
  if (!edges.same_shape(original)) {
    fail(ErrorCode::DimensionMismatch, "edge map is " + std::to_string(edges.width()) + "x" +
                                           std::to_string(edges.height()) + " but the image is " +
                                           std::to_string(original.width()) + "x" +
                                           std::to_string(original.height()));
  }
  const Image edge_img = edges.to_image();
  MetricsReport r;
  r.original = glcm_stats(glcm(original, config.glcm_levels, config.glcm_offset));
  r.edge = glcm_stats(glcm(edge_img, config.glcm_levels, config.glcm_offset));
  r.contrast_ratio = contrast_ratio(original, edges);
  r.eme = eme(edge_img, config.eme_block, config.eme_block);
  return r;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      "image",          "method",           "contrast_orig",    "contrast_edge",
      "correlation_orig", "correlation_edge", "energy_orig",    "energy_edge",
      "entropy_orig",   "entropy_edge",     "homogeneity_orig", "homogeneity_edge",
      "contrast_ratio", "eme",              "params"};
  return cols;
}

namespace {

ParamList with_flags(const MetricsReport& r) {
  ParamList params = r.params;
  if (!r.original.correlation_defined) params.emplace_back("flag.correlation_orig", "undefined");
  if (!r.edge.correlation_defined) params.emplace_back("flag.correlation_edge", "undefined");
  if (!r.contrast_ratio) params.emplace_back("flag.contrast_ratio", "undefined");
  return params;
}

}  // namespace

std::string report_csv_header(const std::vector<std::string>& extra) {
  std::string out;
  for (const auto& c : report_columns()) out += (out.empty() ? "" : ",") + c;
  for (const auto& c : extra) out += "," + csv_field(c);
  return out + "\r\n";
}

std::string report_csv_row(const MetricsReport& r, const std::vector<std::string>& extra) {
  std::vector<std::string> f = {
      r.image,
      r.method,
      format_number(r.original.contrast),
      format_number(r.edge.contrast),
      format_number(r.original.correlation),
      format_number(r.edge.correlation),
      format_number(r.original.energy),
      format_number(r.edge.energy),
      format_number(r.original.entropy),
      format_number(r.edge.entropy),
      format_number(r.original.homogeneity),
      format_number(r.edge.homogeneity),
      r.contrast_ratio ? format_number(*r.contrast_ratio) : std::string(),
      format_number(r.eme),
      params_field(with_flags(r)),
  };
  f.insert(f.end(), extra.begin(), extra.end());
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + csv_field(f[i]);
  return out + "\r\n";
}

std::string reports_json(const std::vector<MetricsReport>& reports, const std::vector<NumericFields>& extra) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const MetricsReport& r = reports[i];
    nlohmann::ordered_json o;
    o["image"] = r.image;
    o["method"] = r.method;
    o["contrast_orig"] = r.original.contrast;
    o["contrast_edge"] = r.edge.contrast;
    o["correlation_orig"] = r.original.correlation;
    o["correlation_edge"] = r.edge.correlation;
    o["energy_orig"] = r.original.energy;
    o["energy_edge"] = r.edge.energy;
    o["entropy_orig"] = r.original.entropy;
    o["entropy_edge"] = r.edge.entropy;
    o["homogeneity_orig"] = r.original.homogeneity;
    o["homogeneity_edge"] = r.edge.homogeneity;
    o["contrast_ratio"] = r.contrast_ratio ? nlohmann::ordered_json(*r.contrast_ratio) : nullptr;
    o["eme"] = r.eme;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : with_flags(r)) params[k] = v;
    o["params"] = std::move(params);
    if (i < extra.size()) {
      for (const auto& [k, v] : extra[i]) o[k] = v;
    }
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

}  // namespace tropedge
