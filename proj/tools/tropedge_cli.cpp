#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "tropedge/tropedge.h"

namespace fs = std::filesystem;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kInputError = 2,
  kUnknownMethod = 3,
  kEmptyBatch = 4,
  kDimensionMismatch = 5,
};

int exit_code(te_status s) {
  switch (s) {
    case TE_OK:
      return kOk;
    case TE_INVALID_INPUT:
    case TE_IO_ERROR:
      return kInputError;
    case TE_UNKNOWN_METHOD:
      return kUnknownMethod;
    case TE_EMPTY_INPUT:
      return kEmptyBatch;
    case TE_DIMENSION_MISMATCH:
      return kDimensionMismatch;
    case TE_INTERNAL_ERROR:
      break;
  }
  return kFailure;
}

struct Failure {
  int code;
  std::string message;
};

void check(te_status s, const std::string& context) {
  if (s != TE_OK) throw Failure{exit_code(s), context + ": " + te_last_error()};
}

struct ImageDeleter {
  void operator()(te_image* p) const { te_image_free(p); }
};
struct ConfigDeleter {
  void operator()(te_config* p) const { te_config_free(p); }
};
struct ResultDeleter {
  void operator()(te_result* p) const { te_result_free(p); }
};
using ImagePtr = std::unique_ptr<te_image, ImageDeleter>;
using ConfigPtr = std::unique_ptr<te_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<te_result, ResultDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  te_string_free(s);
  return out;
}

struct Options {
  std::vector<std::string> methods;
  std::string input;
  std::string edges;
  std::string out;  // empty means the working directory
  std::string format = "csv";
  bool paper_protocol = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::optional<int> window;
  std::string scales;
  std::string bank_file;
  bool save_intermediates = false;
  std::string config;
  std::vector<std::string> sets;
};

ConfigPtr build_config(const Options& o) {
  te_config* raw = nullptr;
  check(te_config_create(&raw), "config");
  ConfigPtr cfg(raw);
  if (!o.config.empty()) check(te_config_load_file(cfg.get(), o.config.c_str()), o.config);
  auto set = [&](const std::string& key, const std::string& value) {
    check(te_config_set(cfg.get(), nullptr, key.c_str(), value.c_str()), "--" + key);
  };
  if (o.paper_protocol) set("paper_protocol", "true");
  if (o.seed) set("seed", std::to_string(*o.seed));
  if (o.threshold) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *o.threshold);
    set("threshold", buf);
  }
  if (o.window) set("threshold.window", std::to_string(*o.window));
  if (!o.scales.empty()) set("scales", o.scales);
  if (!o.bank_file.empty()) set("bank_file", o.bank_file);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{kInputError, "--set expects key=value, got '" + kv + "'"};
    std::string key = kv.substr(0, eq);
    std::string section;
    if (const auto colon = key.find(':'); colon != std::string::npos) {
      section = key.substr(0, colon);
      key = key.substr(colon + 1);
    }
    check(te_config_set(cfg.get(), section.c_str(), key.c_str(), kv.substr(eq + 1).c_str()), "--set " + kv);
  }
  return cfg;
}

void require_methods_known(const std::vector<std::string>& methods) {
  for (const auto& m : methods) {
    if (!te_method_is_known(m.c_str())) throw Failure{kUnknownMethod, "unknown method '" + m + "'"};
  }
}

ImagePtr load(const std::string& path) {
  te_image* raw = nullptr;
  check(te_image_load(path.c_str(), &raw), "cannot load input");
  return ImagePtr(raw);
}

fs::path out_dir(const Options& o) { return o.out.empty() ? fs::path(".") : fs::path(o.out); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kInputError, "cannot create output directory " + dir.string() + ": " + ec.message()};
}

void save(const te_image* img, const fs::path& path) { check(te_image_save(img, path.string().c_str()), path.string()); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{kInputError, "cannot write " + path.string()};
}

ResultPtr run_methods(const te_image* img, const std::vector<std::string>& methods, const te_config* cfg,
                      unsigned threads) {
  std::vector<const char*> names;
  for (const auto& m : methods) names.push_back(m.c_str());
  te_result* raw = nullptr;
  check(te_run(img, names.data(), names.size(), cfg, threads, &raw), "run");
  return ResultPtr(raw);
}

ImagePtr stage_image(const te_result* res, std::size_t run, const std::string& name) {
  for (std::size_t k = 0; k < te_result_intermediate_count(res, run); ++k) {
    if (name == te_result_intermediate_name(res, run, k)) {
      te_image* raw = nullptr;
      check(te_result_intermediate_image(res, run, k, &raw), "intermediate");
      return ImagePtr(raw);
    }
  }
  throw Failure{kFailure, "missing intermediate '" + name + "'"};
}

ImagePtr edges_of(const te_result* res, std::size_t run) {
  te_image* raw = nullptr;
  check(te_result_edges(res, run, &raw), "edges");
  return ImagePtr(raw);
}

/// Writes each edge map and, when requested, every stage image.
void write_outputs(const te_result* res, const std::vector<std::string>& methods, const std::string& stem,
                   const fs::path& out, bool intermediates) {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    save(edges_of(res, i).get(), out / (stem + "_" + methods[i] + ".png"));
    if (!intermediates) continue;
    for (std::size_t k = 0; k < te_result_intermediate_count(res, i); ++k) {
      te_image* raw = nullptr;
      check(te_result_intermediate_image(res, i, k, &raw), "intermediate");
      ImagePtr img(raw);
      const double* px = te_image_pixels(img.get());
      const std::size_t n = static_cast<std::size_t>(te_image_width(img.get())) * te_image_height(img.get());
      const auto [lo, hi] = std::minmax_element(px, px + n);
      if (*lo < 0.0 || *hi > 1.0) {
        te_image* norm = nullptr;
        check(te_image_normalize(img.get(), &norm), "normalize");
        img.reset(norm);
      }
      const std::string name = te_result_intermediate_name(res, i, k);
      save(img.get(), out / (stem + "_" + methods[i] + "_" + name + ".png"));
    }
  }
}

std::string report(const std::vector<const te_result*>& results, const std::string& format,
                   const std::vector<double>* wall_ms = nullptr) {
  char* text = nullptr;
  const double* ms = wall_ms ? wall_ms->data() : nullptr;
  if (format == "json") {
    check(te_report_json(results.data(), results.size(), ms, &text), "report");
  } else {
    check(te_report_csv(results.data(), results.size(), ms, &text), "report");
  }
  return take(text);
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TROPEDGE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) n = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw Failure{kInputError, std::string("TROPEDGE_THREADS must be a positive integer, got '") + env + "'"};
    }
  }
  return n;
}

int cmd_detect(const Options& o) {
  if (o.methods.size() != 1) throw Failure{kInputError, "detect takes exactly one --method"};
  require_methods_known(o.methods);
  ImagePtr img = load(o.input);
  ConfigPtr cfg = build_config(o);
  ResultPtr res = run_methods(img.get(), o.methods, cfg.get(), 1);
  const std::string stem = fs::path(o.input).stem().string();
  check(te_result_set_label(res.get(), stem.c_str()), "label");
  ensure_dir(out_dir(o));
  write_outputs(res.get(), o.methods, stem, out_dir(o), o.save_intermediates);
  std::cout << (out_dir(o) / (stem + "_" + o.methods[0] + ".png")).string() << "\n";
  return kOk;
}

int cmd_compare(const Options& o) {
  if (o.methods.size() < 2) throw Failure{kInputError, "compare needs at least two --method values"};
  require_methods_known(o.methods);
  ImagePtr img = load(o.input);
  ConfigPtr cfg = build_config(o);
  ResultPtr res = run_methods(img.get(), o.methods, cfg.get(), worker_count());
  const std::string stem = fs::path(o.input).stem().string();
  check(te_result_set_label(res.get(), stem.c_str()), "label");
  ensure_dir(out_dir(o));
  write_outputs(res.get(), o.methods, stem, out_dir(o), o.save_intermediates);

  std::vector<ImagePtr> panels;
  panels.push_back(stage_image(res.get(), 0, "gray"));
  for (std::size_t i = 0; i < o.methods.size(); ++i) panels.push_back(edges_of(res.get(), i));
  std::vector<const te_image*> views;
  for (const auto& p : panels) views.push_back(p.get());
  te_image* montage = nullptr;
  check(te_image_montage(views.data(), views.size(), &montage), "montage");
  save(ImagePtr(montage).get(), out_dir(o) / (stem + "_montage.png"));

  const fs::path report_path = out_dir(o) / (stem + "_report." + o.format);
  write_text(report_path, report({res.get()}, o.format));
  std::cout << report_path.string() << "\n";
  return kOk;
}

int cmd_bench(const Options& o) {
  std::vector<std::string> methods = o.methods;
  if (methods.empty()) methods = {"adapt-thresh-min", "8k-min", "4k-max"};
  require_methods_known(methods);
  std::error_code ec;
  if (!fs::is_directory(o.input, ec)) throw Failure{kInputError, "not a directory: " + o.input};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.input)) {
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (entry.is_regular_file() && (ext == ".png" || ext == ".pgm")) files.push_back(entry.path());
  }
  if (files.empty()) throw Failure{kEmptyBatch, "no supported images in " + o.input};
  std::sort(files.begin(), files.end());
  ConfigPtr cfg = build_config(o);

  const std::size_t jobs = files.size() * methods.size();
  std::vector<ResultPtr> results(jobs);
  std::vector<double> wall_ms(jobs, 0.0);
  std::vector<std::optional<Failure>> failures(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next++; f < files.size(); f = next++) {
      try {
        ImagePtr img = load(files[f].string());
        const std::string stem = files[f].stem().string();
        for (std::size_t m = 0; m < methods.size(); ++m) {
          const auto t0 = std::chrono::steady_clock::now();
          ResultPtr res = run_methods(img.get(), {methods[m]}, cfg.get(), 1);
          const auto t1 = std::chrono::steady_clock::now();
          check(te_result_set_label(res.get(), stem.c_str()), "label");
          wall_ms[f * methods.size() + m] = std::chrono::duration<double, std::milli>(t1 - t0).count();
          results[f * methods.size() + m] = std::move(res);
        }
      } catch (Failure& e) {
        failures[f] = Failure{e.code, files[f].string() + ": " + e.message};
      }
    }
  };
  const unsigned n = std::min<std::size_t>(worker_count(), files.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures)
    if (f) throw *f;

  std::vector<const te_result*> views;
  for (const auto& r : results) views.push_back(r.get());
  ensure_dir(out_dir(o));
  const fs::path path = out_dir(o) / ("bench." + o.format);
  write_text(path, report(views, o.format, &wall_ms));
  std::cout << path.string() << "\n";
  return kOk;
}

int cmd_metrics(const Options& o) {
  ImagePtr original = load(o.input);
  ImagePtr edges = load(o.edges);
  ConfigPtr cfg = build_config(o);
  const std::string stem = fs::path(o.input).stem().string();
  te_result* raw = nullptr;
  check(te_metrics(original.get(), edges.get(), cfg.get(), stem.c_str(), &raw), "metrics");
  ResultPtr res(raw);
  const std::string text = report({res.get()}, o.format);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_text(fs::path(o.out) / (stem + "_metrics." + o.format), text);
  }
  std::cout << text;
  return kOk;
}

void add_common(CLI::App* cmd, Options& o, bool with_methods) {
  if (with_methods) {
    cmd->add_option("-m,--method", o.methods, "Method identifier (repeatable)");
  }
  cmd->add_option("-o,--out", o.out, "Output directory");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--paper-protocol", o.paper_protocol, "Resize inputs to 400x300 before processing");
  cmd->add_option("--seed", o.seed, "Seed for random-max");
  cmd->add_option("--threshold", o.threshold, "Fixed global threshold in [0,1]");
  cmd->add_option("--window", o.window, "Adaptive threshold window (odd)");
  cmd->add_option("--scales", o.scales, "Scale pair s,l");
  cmd->add_option("--bank-file", o.bank_file, "Kernel bank file");
  cmd->add_flag("--save-intermediates", o.save_intermediates, "Write every stage image");
  cmd->add_option("--config", o.config, "Config file (key = value, [method] sections)");
  cmd->add_option("--set", o.sets, "Override a config key: key=value or method:key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tropical-algebra edge detection"};
  app.set_version_flag("--version", te_version());
  app.require_subcommand(1);
  Options o;

  auto* detect = app.add_subcommand("detect", "Run one method on one image");
  detect->add_option("-i,--input", o.input, "Input image")->required();
  add_common(detect, o, true);

  auto* compare = app.add_subcommand("compare", "Run several methods on one image; write a montage and report");
  compare->add_option("-i,--input", o.input, "Input image")->required();
  add_common(compare, o, true);

  auto* bench = app.add_subcommand("bench", "Run methods over every image in a directory");
  bench->add_option("-i,--input", o.input, "Input directory")->required();
  add_common(bench, o, true);

  auto* metrics = app.add_subcommand("metrics", "Report metrics for an image and an existing edge map");
  metrics->add_option("-i,--input", o.input, "Original image")->required();
  metrics->add_option("--edges", o.edges, "Edge map image (>= 0.5 is an edge)")->required();
  add_common(metrics, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (detect->parsed()) return cmd_detect(o);
    if (compare->parsed()) return cmd_compare(o);
    if (bench->parsed()) return cmd_bench(o);
    return cmd_metrics(o);
  } catch (const Failure& f) {
    std::cerr << "tropedge: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "tropedge: " << e.what() << "\n";
    return kFailure;
  }
}
