#include "tropedge/tropedge.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "tropedge/image_io.hpp"
#include "tropedge/pipeline.hpp"

struct te_image {
  tropedge::Image img;
};

struct te_config {
  tropedge::Config cfg;
};

struct te_result {
  std::vector<tropedge::PipelineResult> runs;
};

namespace {

thread_local std::string g_last_error;

te_status to_status(tropedge::ErrorCode code) {
  switch (code) {
    case tropedge::ErrorCode::InvalidInput:
      return TE_INVALID_INPUT;
    case tropedge::ErrorCode::Io:
      return TE_IO_ERROR;
    case tropedge::ErrorCode::UnknownMethod:
      return TE_UNKNOWN_METHOD;
    case tropedge::ErrorCode::EmptyInput:
      return TE_EMPTY_INPUT;
    case tropedge::ErrorCode::DimensionMismatch:
      return TE_DIMENSION_MISMATCH;
  }
  return TE_INTERNAL_ERROR;
}

template <typename F>
te_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return TE_OK;
  } catch (const tropedge::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return TE_INTERNAL_ERROR;
}

void require(bool ok, const char* what) {
  if (!ok) tropedge::fail(tropedge::ErrorCode::InvalidInput, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

te_image* wrap(tropedge::Image img) { return new te_image{std::move(img)}; }

const tropedge::PipelineResult& run_at(const te_result* res, std::size_t index) {
  require(res != nullptr, "result is null");
  if (index >= res->runs.size()) tropedge::fail(tropedge::ErrorCode::InvalidInput, "result index out of range");
  return res->runs[index];
}

std::vector<const tropedge::MetricsReport*> collect(const te_result* const* results, std::size_t count) {
  require(results != nullptr || count == 0, "results array is null");
  std::vector<const tropedge::MetricsReport*> out;
  for (std::size_t i = 0; i < count; ++i) {
    require(results[i] != nullptr, "result is null");
    for (const auto& run : results[i]->runs) out.push_back(&run.report);
  }
  return out;
}

std::string format_ms(double ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

}  // namespace

extern "C" {

const char* te_version(void) { return tropedge::kVersion; }

const char* te_last_error(void) { return g_last_error.c_str(); }

void te_string_free(char* s) { std::free(s); }

te_status te_image_load(const char* path, te_image** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = wrap(tropedge::load_grayscale(path));
  });
}

te_status te_image_from_gray(const double* pixels, int width, int height, te_image** out) {
  return guarded([&] {
    require(pixels != nullptr && out != nullptr, "null argument");
    if (width <= 0 || height <= 0) tropedge::fail(tropedge::ErrorCode::InvalidInput, "image dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    *out = wrap(tropedge::Image(width, height, std::vector<double>(pixels, pixels + n)));
  });
}

int te_image_width(const te_image* img) { return img ? img->img.width() : 0; }

int te_image_height(const te_image* img) { return img ? img->img.height() : 0; }

const double* te_image_pixels(const te_image* img) { return img ? img->img.pixels().data() : nullptr; }

te_status te_image_save(const te_image* img, const char* path) {
  return guarded([&] {
    require(img != nullptr && path != nullptr, "null argument");
    tropedge::save_grayscale(img->img, path);
  });
}

te_status te_image_resize(const te_image* img, int width, int height, te_image** out) {
  return guarded([&] {
    require(img != nullptr && out != nullptr, "null argument");
    *out = wrap(tropedge::resize_to(img->img, width, height));
  });
}

te_status te_image_normalize(const te_image* img, te_image** out) {
  return guarded([&] {
    require(img != nullptr && out != nullptr, "null argument");
    *out = wrap(tropedge::normalize(img->img));
  });
}

te_status te_image_montage(const te_image* const* panels, size_t count, te_image** out) {
  return guarded([&] {
    require(panels != nullptr && out != nullptr, "null argument");
    if (count == 0) tropedge::fail(tropedge::ErrorCode::EmptyInput, "montage needs at least one panel");
    const int h = panels[0]->img.height();
    int w = 0;
    for (size_t i = 0; i < count; ++i) {
      require(panels[i] != nullptr, "panel is null");
      if (panels[i]->img.height() != h) {
        tropedge::fail(tropedge::ErrorCode::DimensionMismatch, "montage panels differ in height");
      }
      w += panels[i]->img.width();
    }
    tropedge::Image m(w, h);
    int x0 = 0;
    for (size_t i = 0; i < count; ++i) {
      const tropedge::Image& p = panels[i]->img;
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < p.width(); ++c) m(r, x0 + c) = p(r, c);
      x0 += p.width();
    }
    *out = wrap(std::move(m));
  });
}

void te_image_free(te_image* img) { delete img; }

te_status te_config_create(te_config** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new te_config{};
  });
}

void te_config_free(te_config* cfg) { delete cfg; }

te_status te_config_set(te_config* cfg, const char* section, const char* key, const char* value) {
  return guarded([&] {
    require(cfg != nullptr && key != nullptr && value != nullptr, "null argument");
    cfg->cfg.set(section ? section : "", key, value);
  });
}

te_status te_config_load_file(te_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg != nullptr && path != nullptr, "null argument");
    const tropedge::Config loaded = tropedge::load_config(path);
    tropedge::Config merged = cfg->cfg;
    for (const auto& [k, v] : loaded.global()) merged.set("", k, v);
    for (const auto& [section, entries] : loaded.sections())
      for (const auto& [k, v] : entries) merged.set(section, k, v);
    cfg->cfg = std::move(merged);
  });
}

te_status te_config_dump(const te_config* cfg, char** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    *out = dup_string(tropedge::format_config(cfg->cfg));
  });
}

te_status te_config_dump_method(const te_config* cfg, const char* method, char** out) {
  return guarded([&] {
    require(method != nullptr && out != nullptr, "null argument");
    const tropedge::PipelineSpec spec =
        cfg ? cfg->cfg.spec_for(method) : tropedge::default_spec(method);
    *out = dup_string(tropedge::format_config(spec));
  });
}

int te_method_is_known(const char* method) { return method && tropedge::is_known_method(method) ? 1 : 0; }

size_t te_method_count(void) { return tropedge::known_methods().size(); }

const char* te_method_name(size_t index) {
  const auto& names = tropedge::known_methods();
  return index < names.size() ? names[index].c_str() : nullptr;
}

te_status te_run(const te_image* gray, const char* const* methods, size_t count, const te_config* cfg,
                 unsigned threads, te_result** out) {
  return guarded([&] {
    require(gray != nullptr && out != nullptr, "null argument");
    if (count == 0) tropedge::fail(tropedge::ErrorCode::InvalidInput, "no methods requested");
    require(methods != nullptr, "methods array is null");
    const tropedge::Config empty;
    const tropedge::Config& c = cfg ? cfg->cfg : empty;
    std::vector<tropedge::PipelineSpec> specs;
    for (size_t i = 0; i < count; ++i) {
      require(methods[i] != nullptr, "method name is null");
      specs.push_back(c.spec_for(methods[i]));
    }
    auto res = std::make_unique<te_result>();
    res->runs = tropedge::run_comparison(gray->img, specs, threads == 0 ? 1 : threads);
    *out = res.release();
  });
}

te_status te_metrics(const te_image* original, const te_image* edges, const te_config* cfg, const char* label,
                     te_result** out) {
  return guarded([&] {
    require(original != nullptr && edges != nullptr && out != nullptr, "null argument");
    const tropedge::MetricsConfig mc = cfg ? cfg->cfg.spec_for("4k-max").metrics : tropedge::MetricsConfig{};
    if (mc.glcm_levels < 2) tropedge::fail(tropedge::ErrorCode::InvalidInput, "metrics.glcm_levels must be >= 2");
    const auto& a = original->img;
    const auto& b = edges->img;
    if (a.width() != b.width() || a.height() != b.height()) {
      tropedge::fail(tropedge::ErrorCode::DimensionMismatch,
                     "edge map is " + std::to_string(b.width()) + "x" + std::to_string(b.height()) +
                         " but the original is " + std::to_string(a.width()) + "x" + std::to_string(a.height()));
    }
    tropedge::PipelineResult run;
    run.edge_map = tropedge::EdgeMap::from_image(b);
    run.report = tropedge::compute_report(a, run.edge_map, mc);
    run.report.image = label ? label : "";
    run.report.method = "edge-map";
    run.report.params = {
        {"version", tropedge::kVersion},
        {"method", "edge-map"},
        {"edge_threshold", "0.5"},
        {"metrics.glcm_levels", std::to_string(mc.glcm_levels)},
        {"metrics.glcm_drow", std::to_string(mc.glcm_offset.drow)},
        {"metrics.glcm_dcol", std::to_string(mc.glcm_offset.dcol)},
        {"metrics.glcm_symmetric", "false"},
        {"metrics.entropy_base", "2"},
        {"metrics.eme_block", std::to_string(mc.eme_block)},
    };
    auto res = std::make_unique<te_result>();
    res->runs.push_back(std::move(run));
    *out = res.release();
  });
}

size_t te_result_count(const te_result* res) { return res ? res->runs.size() : 0; }

te_status te_result_edges(const te_result* res, size_t index, te_image** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = wrap(run_at(res, index).edge_map.to_image());
  });
}

size_t te_result_intermediate_count(const te_result* res, size_t index) {
  if (!res || index >= res->runs.size()) return 0;
  return res->runs[index].intermediates.size();
}

const char* te_result_intermediate_name(const te_result* res, size_t index, size_t stage) {
  if (!res || index >= res->runs.size() || stage >= res->runs[index].intermediates.size()) return nullptr;
  return res->runs[index].intermediates[stage].name.c_str();
}

te_status te_result_intermediate_image(const te_result* res, size_t index, size_t stage, te_image** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto& run = run_at(res, index);
    if (stage >= run.intermediates.size()) tropedge::fail(tropedge::ErrorCode::InvalidInput, "stage out of range");
    *out = wrap(run.intermediates[stage].image);
  });
}

te_status te_result_set_label(te_result* res, const char* label) {
  return guarded([&] {
    require(res != nullptr && label != nullptr, "null argument");
    for (auto& run : res->runs) run.report.image = label;
  });
}

void te_result_free(te_result* res) { delete res; }

te_status te_report_csv(const te_result* const* results, size_t count, const double* wall_ms, char** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto reports = collect(results, count);
    const std::vector<std::string> extra_cols = wall_ms ? std::vector<std::string>{"wall_ms"}
                                                        : std::vector<std::string>{};
    std::string csv = tropedge::report_csv_header(extra_cols);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      std::vector<std::string> extra;
      if (wall_ms) extra.push_back(format_ms(wall_ms[i]));
      csv += tropedge::report_csv_row(*reports[i], extra);
    }
    *out = dup_string(csv);
  });
}

te_status te_report_json(const te_result* const* results, size_t count, const double* wall_ms, char** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto reports = collect(results, count);
    std::vector<tropedge::MetricsReport> copies;
    std::vector<tropedge::NumericFields> extra;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      copies.push_back(*reports[i]);
      if (wall_ms) extra.push_back({{"wall_ms", wall_ms[i]}});
    }
    *out = dup_string(tropedge::reports_json(copies, extra));
  });
}

}  // extern "C"
