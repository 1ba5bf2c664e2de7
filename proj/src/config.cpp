#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "tropedge/pipeline.hpp"

namespace tropedge {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  fail(ErrorCode::InvalidInput,
       "invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " + expected + ")");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a real number");
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

using Setter = std::function<void(PipelineSpec&, std::string_view key, std::string_view value)>;
using Getter = std::function<std::string(const PipelineSpec&)>;

struct KeyDef {
  const char* key;
  Setter set;
  Getter get;  // empty for write-only shorthands
};

#define TE_REAL(KEY, FIELD)                                                              \
  KeyDef {                                                                               \
    KEY, [](PipelineSpec& s, std::string_view k, std::string_view v) { s.FIELD = to_double(k, v); }, \
        [](const PipelineSpec& s) { return fmt(s.FIELD); }                              \
  }
#define TE_INT(KEY, FIELD, TYPE)                                                          \
  KeyDef {                                                                                \
    KEY, [](PipelineSpec& s, std::string_view k, std::string_view v) { s.FIELD = to_int<TYPE>(k, v); }, \
        [](const PipelineSpec& s) { return std::to_string(s.FIELD); }                    \
  }
#define TE_BOOL(KEY, FIELD)                                                              \
  KeyDef {                                                                               \
    KEY, [](PipelineSpec& s, std::string_view k, std::string_view v) { s.FIELD = to_bool(k, v); }, \
        [](const PipelineSpec& s) { return fmt(s.FIELD); }                              \
  }

const std::vector<KeyDef>& key_defs() {
  static const std::vector<KeyDef> defs = {
      TE_BOOL("paper_protocol", paper_protocol),
      TE_REAL("bilateral.sigma_spatial", bilateral.sigma_spatial),
      TE_REAL("bilateral.sigma_range", bilateral.sigma_range),
      TE_INT("bilateral.radius", bilateral.radius, int),
      TE_REAL("shock.lambda", shock.lambda),
      TE_INT("shock.iterations", shock.iterations, int),
      TE_REAL("scales.small", scales.small),
      TE_REAL("scales.large", scales.large),
      {"scales",
       [](PipelineSpec& s, std::string_view k, std::string_view v) {
         const auto comma = v.find(',');
         if (comma == std::string_view::npos) bad_value(k, v, "s,l");
         s.scales.small = to_double(k, trim(v.substr(0, comma)));
         s.scales.large = to_double(k, trim(v.substr(comma + 1)));
       },
       {}},
      {"bank",
       [](PipelineSpec& s, std::string_view, std::string_view v) {
         if (!v.empty()) banks::by_name(v);
         s.bank = std::string(v);
       },
       [](const PipelineSpec& s) { return s.bank; }},
      {"bank_file", [](PipelineSpec& s, std::string_view, std::string_view v) { s.bank_file = std::string(v); },
       [](const PipelineSpec& s) { return s.bank_file; }},
      {"semiring",
       [](PipelineSpec& s, std::string_view k, std::string_view v) {
         if (v == "min-plus") {
           s.semiring = Semiring::MinPlus;
         } else if (v == "max-plus") {
           s.semiring = Semiring::MaxPlus;
         } else {
           bad_value(k, v, "min-plus or max-plus");
         }
       },
       [](const PipelineSpec& s) { return std::string(s.semiring == Semiring::MinPlus ? "min-plus" : "max-plus"); }},
      {"threshold.mode",
       [](PipelineSpec& s, std::string_view k, std::string_view v) {
         if (v == "adaptive-mean") {
           s.threshold.mode = ThresholdMode::AdaptiveMean;
         } else if (v == "global") {
           s.threshold.mode = ThresholdMode::GlobalFixed;
         } else if (v == "otsu") {
           s.threshold.mode = ThresholdMode::Otsu;
         } else {
           bad_value(k, v, "adaptive-mean, global or otsu");
         }
       },
       [](const PipelineSpec& s) {
         switch (s.threshold.mode) {
           case ThresholdMode::AdaptiveMean:
             return std::string("adaptive-mean");
           case ThresholdMode::GlobalFixed:
             return std::string("global");
           case ThresholdMode::Otsu:
             return std::string("otsu");
         }
         return std::string();
       }},
      TE_REAL("threshold.value", threshold.value),
      TE_INT("threshold.window", threshold.window, int),
      TE_REAL("threshold.offset", threshold.offset),
      TE_BOOL("threshold.random", random_threshold),
      {"threshold",
       [](PipelineSpec& s, std::string_view k, std::string_view v) {
         s.threshold.value = to_double(k, v);
         s.threshold.mode = ThresholdMode::GlobalFixed;
         s.random_threshold = false;
       },
       {}},
      {"seed",
       [](PipelineSpec& s, std::string_view k, std::string_view v) {
         if (v == "none") {
           s.seed.reset();
         } else {
           s.seed = to_int<std::uint64_t>(k, v);
         }
       },
       [](const PipelineSpec& s) { return s.seed ? std::to_string(*s.seed) : std::string("none"); }},
      TE_BOOL("enhance.hessian", enhance.hessian),
      TE_REAL("enhance.hessian_sigma", enhance.hessian_sigma),
      TE_BOOL("enhance.wavelet", enhance.wavelet),
      TE_BOOL("enhance.thin", enhance.thin),
      TE_BOOL("enhance.area_filter", enhance.area_filter),
      TE_INT("enhance.min_area", enhance.min_area, std::size_t),
      TE_REAL("canny.sigma", canny.sigma),
      TE_REAL("canny.low", canny.low),
      TE_REAL("canny.high", canny.high),
      TE_REAL("log.sigma", log_sigma),
      TE_REAL("log.contrast_floor", log_contrast_floor),
      TE_INT("metrics.glcm_levels", metrics.glcm_levels, int),
      TE_INT("metrics.glcm_drow", metrics.glcm_offset.drow, int),
      TE_INT("metrics.glcm_dcol", metrics.glcm_offset.dcol, int),
      TE_INT("metrics.eme_block", metrics.eme_block, int),
  };
  return defs;
}

#undef TE_REAL
#undef TE_INT
#undef TE_BOOL

const KeyDef* find_key(std::string_view key) {
  for (const auto& d : key_defs())
    if (key == d.key) return &d;
  return nullptr;
}

void upsert(ParamList& list, std::string_view key, std::string_view value) {
  for (auto& [k, v] : list) {
    if (k == key) {
      v = std::string(value);
      return;
    }
  }
  list.emplace_back(std::string(key), std::string(value));
}

void validate_group(const PipelineSpec& spec, std::string_view key) {
  const auto group = key.substr(0, key.find('.'));
  if (group == "bilateral") {
    spec.bilateral.validate();
  } else if (group == "shock") {
    spec.shock.validate();
  } else if (group == "scales") {
    spec.scales.validate();
  } else if (group == "threshold") {
    spec.threshold.validate();
  } else if (group == "log") {
    if (!(spec.log_sigma > 0.0)) fail(ErrorCode::InvalidInput, "log.sigma must be positive");
    if (!(spec.log_contrast_floor >= 0.0)) fail(ErrorCode::InvalidInput, "log.contrast_floor must be >= 0");
  } else if (key == "canny.sigma") {
    if (!(spec.canny.sigma > 0.0)) fail(ErrorCode::InvalidInput, "canny.sigma must be positive");
  } else if (key == "enhance.hessian_sigma") {
    if (!(spec.enhance.hessian_sigma >= 0.0)) fail(ErrorCode::InvalidInput, "enhance.hessian_sigma must be >= 0");
  } else if (group == "metrics") {
    if (spec.metrics.glcm_levels < 2 || spec.metrics.glcm_levels > 256) {
      fail(ErrorCode::InvalidInput, "metrics.glcm_levels must be in 2..256");
    }
    if (spec.metrics.eme_block < 1) fail(ErrorCode::InvalidInput, "metrics.eme_block must be >= 1");
  }
}

}  // namespace

void apply_override(PipelineSpec& spec, std::string_view key, std::string_view value) {
  const KeyDef* def = find_key(key);
  if (!def) fail(ErrorCode::InvalidInput, "unknown config key '" + std::string(key) + "'");
  def->set(spec, key, trim(value));
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> v;
    for (const auto& d : key_defs()) v.emplace_back(d.key);
    return v;
  }();
  return keys;
}

void Config::set(std::string_view section, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  PipelineSpec scratch = spec_for(section.empty() ? "4k-max" : section);
  apply_override(scratch, key, value);
  validate_group(scratch, key);
  if (section.empty()) {
    upsert(global_, key, value);
  } else {
    upsert(sections_[std::string(section)], key, value);
  }
}

PipelineSpec Config::spec_for(std::string_view method) const {
  PipelineSpec spec = default_spec(method);
  for (const auto& [k, v] : global_) apply_override(spec, k, v);
  if (auto it = sections_.find(method); it != sections_.end()) {
    for (const auto& [k, v] : it->second) apply_override(spec, k, v);
  }
  return spec;
}

Config parse_config(std::string_view text) {
  Config cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') fail(ErrorCode::InvalidInput, "unterminated section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (!is_known_method(section)) {
          fail(ErrorCode::UnknownMethod, "unknown method '" + section + "'");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(ErrorCode::InvalidInput, "expected key = value");
      cfg.set(section, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.code(), "config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const Config& config) {
  std::string out;
  for (const auto& [k, v] : config.global()) out += k + " = " + v + "\n";
  for (const auto& [name, entries] : config.sections()) {
    if (!out.empty()) out += "\n";
    out += "[" + name + "]\n";
    for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  }
  return out;
}

std::string format_config(const PipelineSpec& spec) {
  std::string out = "[" + spec.name + "]\n";
  for (const auto& d : key_defs()) {
    if (d.get) out += std::string(d.key) + " = " + d.get(spec) + "\n";
  }
  return out;
}

}  // namespace tropedge
