#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tropedge/enhance.hpp"
#include "tropedge/image.hpp"
#include "tropedge/metrics.hpp"
#include "tropedge/operators.hpp"
#include "tropedge/preprocess.hpp"
#include "tropedge/tropical.hpp"

namespace tropedge {

inline constexpr const char* kVersion = "1.0.0";

/// Paper-protocol working size (width x height).
inline constexpr int kProtocolWidth = 400;
inline constexpr int kProtocolHeight = 300;

/// Adaptive-mean offset used by the adapt-thresh-min pipeline.
inline constexpr double kPipelineAdaptiveOffset = 0.02;

/// Bounds of the seeded random-max threshold draw.
inline constexpr double kRandomThresholdLow = 0.3;
inline constexpr double kRandomThresholdHigh = 0.7;

struct EnhanceFlags {
  bool hessian = true;
  double hessian_sigma = 1.0;
  bool wavelet = true;
  bool thin = true;
  bool area_filter = true;
  std::size_t min_area = 8;

  bool operator==(const EnhanceFlags&) const = default;
};

/// Every knob of one method run. Pipelines (adapt-thresh-min, 8k-min, 6k-max,
/// 4k-max, random-max) use the bank/semiring/enhance fields; operators (sobel,
/// tg-canny, ...) use the canny/log fields. Both share preprocessing,
/// thresholding and metrics.
struct PipelineSpec {
  std::string name;
  bool paper_protocol = false;
  BilateralParams bilateral;
  ShockParams shock;
  ScalePair scales;
  std::string bank;            // built-in bank name
  std::string bank_file;       // overrides `bank` when non-empty
  Semiring semiring = Semiring::MinPlus;
  ThresholdParams threshold;
  bool random_threshold = false;  // GlobalFixed value drawn from `seed`
  EnhanceFlags enhance;
  std::optional<std::uint64_t> seed;
  CannyParams canny;
  double log_sigma = 1.0;
  double log_contrast_floor = 0.01;
  MetricsConfig metrics;

  void validate() const;
  bool operator==(const PipelineSpec&) const = default;
};

bool is_pipeline(std::string_view name);
bool is_operator(std::string_view name);
bool is_known_method(std::string_view name);

/// Pipelines first, then operators, in a fixed order.
const std::vector<std::string>& known_methods();

/// Defaults for a method; unknown names raise UnknownMethod.
PipelineSpec default_spec(std::string_view name);

/// Threshold actually applied (resolves the seeded random-max draw).
ThresholdParams effective_threshold(const PipelineSpec& spec);

/// Uniform draw from [0.3, 0.7) using the 53 high bits of mt19937_64(seed).
double random_threshold(std::uint64_t seed);

/// Flat key/value record of the complete effective parameter set, including
/// the tool version.
ParamList effective_params(const PipelineSpec& spec);

struct NamedImage {
  std::string name;
  Image image;
};

struct PipelineResult {
  EdgeMap edge_map;
  /// Stage outputs at the final dimensions, in execution order.
  std::vector<NamedImage> intermediates;
  MetricsReport report;

  const Image* intermediate(std::string_view name) const;
};

/// Grayscale input, optionally resized to the paper-protocol size.
Image working_image(const Image& gray, const PipelineSpec& spec);

/// Bilateral then shock filtering of the working image.
Image preprocess(const Image& working, const PipelineSpec& spec);

PipelineResult run_pipeline(const Image& gray, const PipelineSpec& spec);

/// Runs every spec on the same input. Shared preprocessing is computed once.
/// Results follow input order regardless of `threads`.
std::vector<PipelineResult> run_comparison(const Image& gray, const std::vector<PipelineSpec>& specs,
                                           unsigned threads = 1);

/// Key/value overrides, global and per method section. Keys are validated on
/// insertion; a section must name a known method.
class Config {
 public:
  void set(std::string_view section, std::string_view key, std::string_view value);

  /// default_spec(method) with global entries applied, then the method's section.
  PipelineSpec spec_for(std::string_view method) const;

  const ParamList& global() const noexcept { return global_; }
  const std::map<std::string, ParamList, std::less<>>& sections() const noexcept { return sections_; }

  bool operator==(const Config&) const = default;

 private:
  ParamList global_;
  std::map<std::string, ParamList, std::less<>> sections_;
};

/// Applies one key = value setting; unknown keys or malformed values raise
/// InvalidInput.
void apply_override(PipelineSpec& spec, std::string_view key, std::string_view value);

/// Config keys accepted by apply_override.
const std::vector<std::string>& config_keys();

/// `key = value` lines; `[method]` opens a section; '#' starts a comment.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);
std::string format_config(const Config& config);

/// A single [name] section holding every key of the spec.
std::string format_config(const PipelineSpec& spec);

}  // namespace tropedge
