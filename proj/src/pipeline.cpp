#include "tropedge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <random>
#include <thread>

namespace tropedge {

namespace {

struct PipelineDef {
  const char* name;
  const char* bank;
  Semiring semiring;
  ThresholdMode mode;
  bool random;
};

constexpr PipelineDef kPipelines[] = {
    {"adapt-thresh-min", "directional8", Semiring::MinPlus, ThresholdMode::AdaptiveMean, false},
    {"8k-min", "directional8", Semiring::MinPlus, ThresholdMode::Otsu, false},
    {"6k-max", "directional6", Semiring::MaxPlus, ThresholdMode::Otsu, false},
    {"4k-max", "hessian4", Semiring::MaxPlus, ThresholdMode::Otsu, false},
    {"random-max", "hessian4", Semiring::MaxPlus, ThresholdMode::GlobalFixed, true},
};

constexpr const char* kOperators[] = {"roberts", "prewitt", "sobel", "log", "canny",
                                      "tg-roberts", "tg-prewitt", "tg-sobel", "tg-log", "tg-canny"};

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

const char* mode_name(ThresholdMode m) {
  switch (m) {
    case ThresholdMode::AdaptiveMean:
      return "adaptive-mean";
    case ThresholdMode::GlobalFixed:
      return "global";
    case ThresholdMode::Otsu:
      return "otsu";
  }
  return "?";
}

GradientOperator gradient_op(std::string_view name) {
  if (name.ends_with("roberts")) return GradientOperator::Roberts;
  if (name.ends_with("prewitt")) return GradientOperator::Prewitt;
  return GradientOperator::Sobel;
}

Image edges_image(const EdgeMap& e) { return e.to_image(); }

Image subtract(const Image& a, const Image& b) {
  Image out = a;
  auto d = out.pixels();
  auto s = b.pixels();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= s[i];
  return out;
}

/// Optional Hessian weighting and wavelet shrinkage of a [0,1] response.
Image enhance_response(Image response, const PipelineSpec& spec, std::vector<NamedImage>& stages) {
  if (spec.enhance.hessian) {
    response = hessian_enhance(response, hessian_filter(response, spec.enhance.hessian_sigma));
    stages.push_back({"hessian", response});
  }
  if (spec.enhance.wavelet) {
    const Image shrink = wavelet_shrink(response);
    stages.push_back({"wavelet", shrink});
    Image reduced = subtract(response, shrink);
    for (double& v : reduced.pixels()) v = std::max(v, 0.0);
    response = normalize(reduced);
  }
  stages.push_back({"enhanced", response});
  return response;
}

EdgeMap finish_edges(EdgeMap edges, const PipelineSpec& spec, std::vector<NamedImage>& stages) {
  stages.push_back({"thresholded", edges_image(edges)});
  if (spec.enhance.thin) edges = thin(edges);
  if (spec.enhance.area_filter) edges = area_filter(edges, spec.enhance.min_area);
  return edges;
}

EdgeMap run_tropical_pipeline(const Image& pre, const PipelineSpec& spec, std::vector<NamedImage>& stages) {
  const KernelBank bank = spec.bank_file.empty() ? banks::by_name(spec.bank) : load_kernel_bank(spec.bank_file);
  const auto [small, large] = make_scale_pair(pre, spec.scales);
  std::vector<Image> strengths;
  for (const Image* scaled : {&small, &large}) {
    const Image raw = fuse_bank(*scaled, bank, spec.semiring);
    strengths.push_back(spec.semiring == Semiring::MinPlus ? subtract(*scaled, raw) : subtract(raw, *scaled));
  }
  stages.push_back({"strength_small", resize_to(strengths[0], pre.width(), pre.height())});
  stages.push_back({"strength_large", resize_to(strengths[1], pre.width(), pre.height())});
  Image response = normalize(merge_scales(strengths, pre.width(), pre.height()));
  stages.push_back({"response", response});
  response = enhance_response(std::move(response), spec, stages);
  return finish_edges(adaptive_threshold(response, effective_threshold(spec)), spec, stages);
}

Image constant(const Image& like, double v) { return Image(like.width(), like.height(), v); }

EdgeMap fixed_hysteresis(const Image& suppressed, double high) {
  return hysteresis(suppressed, constant(suppressed, kAdaptiveLowRatio * high), constant(suppressed, high));
}

EdgeMap run_operator(const Image& pre, const PipelineSpec& spec, std::vector<NamedImage>& stages) {
  const std::string& n = spec.name;
  const ThresholdParams thr = effective_threshold(spec);
  const bool fixed = thr.mode == ThresholdMode::GlobalFixed;

  if (n == "log") {
    const Image resp = classical_convolve(pre, log_kernel(spec.log_sigma));
    Image magnitude = resp;
    for (double& v : magnitude.pixels()) v = std::abs(v);
    stages.push_back({"response", normalize(magnitude)});
    const double floor = fixed ? thr.value : spec.log_contrast_floor;
    EdgeMap edges = EdgeMap::from_image(log_detect(pre, spec.log_sigma, floor));
    return finish_edges(std::move(edges), spec, stages);
  }
  if (n == "canny") {
    CannyParams p = spec.canny;
    if (fixed) {
      p.validate();
      const Image smoothed = gaussian_blur(pre, p.sigma);
      const GradientPair g = classical_gradient(smoothed, GradientOperator::Sobel);
      const Image mag = normalize(gradient_magnitude(g));
      stages.push_back({"response", mag});
      const Image suppressed = non_max_suppression(mag, g);
      stages.push_back({"suppressed", suppressed});
      return finish_edges(fixed_hysteresis(suppressed, thr.value), spec, stages);
    }
    return finish_edges(canny_detect(pre, p), spec, stages);
  }
  if (n == "tg-canny") {
    TropicalCannyStages s = tg_canny_stages(pre, spec.canny, thr.mode == ThresholdMode::AdaptiveMean
                                                                 ? thr
                                                                 : ThresholdParams{});
    stages.push_back({"smoothed", s.smoothed});
    stages.push_back({"response", s.strength});
    stages.push_back({"suppressed", s.suppressed});
    EdgeMap edges = s.edges;
    if (fixed) {
      edges = fixed_hysteresis(s.suppressed, thr.value);
    } else if (thr.mode == ThresholdMode::Otsu) {
      const double split = (otsu_bin(s.strength) + 1) / 256.0;
      edges = fixed_hysteresis(s.suppressed, split);
    } else {
      stages.push_back({"high", s.high});
      stages.push_back({"low", s.low});
    }
    return finish_edges(std::move(edges), spec, stages);
  }

  Image response;
  if (n == "tg-log") {
    response = tg_log_detect(pre, spec.log_sigma);
  } else if (n.starts_with("tg-")) {
    response = tg_gradient_detect(pre, gradient_op(n));
  } else {
    response = normalize(gradient_magnitude(classical_gradient(pre, gradient_op(n))));
  }
  stages.push_back({"response", response});
  response = enhance_response(std::move(response), spec, stages);
  return finish_edges(adaptive_threshold(response, thr), spec, stages);
}

PipelineResult run_on_preprocessed(const Image& working, const Image& pre, const PipelineSpec& spec) {
  PipelineResult result;
  result.intermediates.push_back({"gray", working});
  result.intermediates.push_back({"preprocessed", pre});
  result.edge_map = is_pipeline(spec.name) ? run_tropical_pipeline(pre, spec, result.intermediates)
                                           : run_operator(pre, spec, result.intermediates);
  result.report = compute_report(working, result.edge_map, spec.metrics);
  result.report.method = spec.name;
  result.report.params = effective_params(spec);
  return result;
}

const PipelineDef* find_pipeline(std::string_view name) {
  for (const auto& d : kPipelines)
    if (name == d.name) return &d;
  return nullptr;
}

void require_known(std::string_view name) {
  if (!is_known_method(name)) fail(ErrorCode::UnknownMethod, "unknown method '" + std::string(name) + "'");
}

}  // namespace

bool is_pipeline(std::string_view name) { return find_pipeline(name) != nullptr; }

bool is_operator(std::string_view name) {
  return std::any_of(std::begin(kOperators), std::end(kOperators), [&](const char* op) { return name == op; });
}

bool is_known_method(std::string_view name) { return is_pipeline(name) || is_operator(name); }

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& d : kPipelines) v.emplace_back(d.name);
    for (const char* op : kOperators) v.emplace_back(op);
    return v;
  }();
  return names;
}

PipelineSpec default_spec(std::string_view name) {
  require_known(name);
  PipelineSpec spec;
  spec.name = std::string(name);
  if (const PipelineDef* d = find_pipeline(name)) {
    spec.bank = d->bank;
    spec.semiring = d->semiring;
    spec.threshold.mode = d->mode;
    spec.random_threshold = d->random;
    if (d->mode == ThresholdMode::AdaptiveMean) spec.threshold.offset = kPipelineAdaptiveOffset;
    if (d->random) spec.seed = 0;
    return spec;
  }
  spec.enhance.hessian = false;
  spec.enhance.wavelet = false;
  spec.enhance.area_filter = false;
  if (name == "log" || name == "canny" || name == "tg-canny") {
    spec.enhance.thin = false;
    if (name == "tg-canny") {
      spec.threshold.mode = ThresholdMode::AdaptiveMean;
      spec.threshold.offset = kTropicalCannyOffset;
    }
  } else {
    spec.threshold.mode = ThresholdMode::Otsu;
  }
  return spec;
}

void PipelineSpec::validate() const {
  require_known(name);
  bilateral.validate();
  shock.validate();
  scales.validate();
  threshold.validate();
  if (is_operator(name)) {
    if (name == "canny" || name == "tg-canny") canny.validate();
    if (!(log_sigma > 0.0)) fail(ErrorCode::InvalidInput, "log.sigma must be positive");
    if (!(log_contrast_floor >= 0.0)) fail(ErrorCode::InvalidInput, "log.contrast_floor must be >= 0");
  } else if (bank_file.empty()) {
    banks::by_name(bank);
  }
  if (random_threshold && !seed) fail(ErrorCode::InvalidInput, name + " requires a seed");
  if (!(enhance.hessian_sigma >= 0.0)) fail(ErrorCode::InvalidInput, "enhance.hessian_sigma must be >= 0");
  if (metrics.glcm_levels < 2 || metrics.glcm_levels > 256) {
    fail(ErrorCode::InvalidInput, "metrics.glcm_levels must be in 2..256");
  }
  if (metrics.glcm_offset.drow == 0 && metrics.glcm_offset.dcol == 0) {
    fail(ErrorCode::InvalidInput, "GLCM offset must be nonzero");
  }
  if (metrics.eme_block < 1) fail(ErrorCode::InvalidInput, "metrics.eme_block must be >= 1");
}

double random_threshold(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return kRandomThresholdLow + (kRandomThresholdHigh - kRandomThresholdLow) * u;
}

ThresholdParams effective_threshold(const PipelineSpec& spec) {
  ThresholdParams t = spec.threshold;
  if (spec.random_threshold) {
    t.mode = ThresholdMode::GlobalFixed;
    t.value = random_threshold(spec.seed.value_or(0));
  }
  return t;
}

ParamList effective_params(const PipelineSpec& spec) {
  const ThresholdParams t = effective_threshold(spec);
  ParamList p = {
      {"version", kVersion},
      {"method", spec.name},
      {"paper_protocol", fmt(spec.paper_protocol)},
      {"bilateral.sigma_spatial", fmt(spec.bilateral.sigma_spatial)},
      {"bilateral.sigma_range", fmt(spec.bilateral.sigma_range)},
      {"bilateral.radius", std::to_string(spec.bilateral.radius)},
      {"shock.lambda", fmt(spec.shock.lambda)},
      {"shock.iterations", std::to_string(spec.shock.iterations)},
  };
  if (is_pipeline(spec.name)) {
    p.emplace_back("scales.small", fmt(spec.scales.small));
    p.emplace_back("scales.large", fmt(spec.scales.large));
    p.emplace_back("bank", spec.bank_file.empty() ? spec.bank : spec.bank_file);
    p.emplace_back("semiring", spec.semiring == Semiring::MinPlus ? "min-plus" : "max-plus");
  } else {
    p.emplace_back("canny.sigma", fmt(spec.canny.sigma));
    p.emplace_back("canny.low", fmt(spec.canny.low));
    p.emplace_back("canny.high", fmt(spec.canny.high));
    p.emplace_back("canny.low_ratio", fmt(kAdaptiveLowRatio));
    p.emplace_back("canny.cone_slope", fmt(kTropicalConeSlope));
    p.emplace_back("log.sigma", fmt(spec.log_sigma));
    p.emplace_back("log.contrast_floor", fmt(spec.log_contrast_floor));
  }
  p.emplace_back("threshold.mode", mode_name(t.mode));
  p.emplace_back("threshold.value", fmt(t.value));
  p.emplace_back("threshold.window", std::to_string(t.window));
  p.emplace_back("threshold.offset", fmt(t.offset));
  p.emplace_back("threshold.random", fmt(spec.random_threshold));
  p.emplace_back("seed", spec.seed ? std::to_string(*spec.seed) : std::string("none"));
  p.emplace_back("enhance.hessian", fmt(spec.enhance.hessian));
  p.emplace_back("enhance.hessian_sigma", fmt(spec.enhance.hessian_sigma));
  p.emplace_back("enhance.wavelet", fmt(spec.enhance.wavelet));
  p.emplace_back("enhance.thin", fmt(spec.enhance.thin));
  p.emplace_back("enhance.area_filter", fmt(spec.enhance.area_filter));
  p.emplace_back("enhance.min_area", std::to_string(spec.enhance.min_area));
  p.emplace_back("metrics.glcm_levels", std::to_string(spec.metrics.glcm_levels));
  p.emplace_back("metrics.glcm_drow", std::to_string(spec.metrics.glcm_offset.drow));
  p.emplace_back("metrics.glcm_dcol", std::to_string(spec.metrics.glcm_offset.dcol));
  p.emplace_back("metrics.glcm_symmetric", "false");
  p.emplace_back("metrics.entropy_base", "2");
  p.emplace_back("metrics.eme_block", std::to_string(spec.metrics.eme_block));
  p.emplace_back("metrics.eme_floor", fmt(kEmeFloor));
  return p;
}

const Image* PipelineResult::intermediate(std::string_view name) const {
  for (const auto& n : intermediates)
    if (n.name == name) return &n.image;
  return nullptr;
}

Image working_image(const Image& gray, const PipelineSpec& spec) {
  if (gray.empty()) fail(ErrorCode::EmptyInput, "input image is empty");
  if (spec.paper_protocol && (gray.width() != kProtocolWidth || gray.height() != kProtocolHeight)) {
    return resize_to(gray, kProtocolWidth, kProtocolHeight);
  }
  return gray;
}

Image preprocess(const Image& working, const PipelineSpec& spec) {
  return shock_filter(bilateral_filter(working, spec.bilateral), spec.shock);
}

PipelineResult run_pipeline(const Image& gray, const PipelineSpec& spec) {
  spec.validate();
  const Image working = working_image(gray, spec);
  return run_on_preprocessed(working, preprocess(working, spec), spec);
}

std::vector<PipelineResult> run_comparison(const Image& gray, const std::vector<PipelineSpec>& specs,
                                           unsigned threads) {
  if (specs.empty()) fail(ErrorCode::InvalidInput, "no methods requested");
  for (const auto& s : specs) require_known(s.name);
  for (const auto& s : specs) s.validate();

  struct Prepared {
    bool paper_protocol;
    BilateralParams bilateral;
    ShockParams shock;
    Image working;
    Image pre;
  };
  std::vector<Prepared> prepared;
  std::vector<std::size_t> slot(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const PipelineSpec& s = specs[i];
    auto it = std::find_if(prepared.begin(), prepared.end(), [&](const Prepared& p) {
      return p.paper_protocol == s.paper_protocol && p.bilateral == s.bilateral && p.shock == s.shock;
    });
    if (it == prepared.end()) {
      Image working = working_image(gray, s);
      Image pre = preprocess(working, s);
      prepared.push_back({s.paper_protocol, s.bilateral, s.shock, std::move(working), std::move(pre)});
      it = prepared.end() - 1;
    }
    slot[i] = static_cast<std::size_t>(it - prepared.begin());
  }

  std::vector<PipelineResult> results(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        const Prepared& p = prepared[slot[i]];
        results[i] = run_on_preprocessed(p.working, p.pre, specs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(specs.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace tropedge
