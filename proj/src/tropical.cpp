#include "tropedge/tropical.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace tropedge {

KernelBank::KernelBank(std::string name, std::vector<Kernel> kernels)
    : name_(std::move(name)), kernels_(std::move(kernels)) {
  if (kernels_.empty()) fail(ErrorCode::InvalidInput, "kernel bank '" + name_ + "' is empty");
  for (const auto& k : kernels_) {
    if (k.size() != kernels_.front().size()) {
      fail(ErrorCode::InvalidInput, "kernel bank '" + name_ + "' mixes kernel sizes");
    }
  }
}

namespace {

void check_fits(const Image& img, const Kernel& kernel) {
  if (kernel.size() > std::min(img.width(), img.height())) {
    fail(ErrorCode::InvalidInput, "kernel (" + std::to_string(kernel.size()) +
                                      ") is larger than the image");
  }
}

template <typename Combine>
Image tropical_pass(const Image& img, const Kernel& kernel, PaddingMode border, double identity,
                    Combine combine) {
  const int radius = kernel.radius();
  const Image padded = pad(img, radius, border);
  Image out(img.width(), img.height(), identity);
  const int w = img.width();
  for (int i = 0; i < kernel.size(); ++i) {
    for (int j = 0; j < kernel.size(); ++j) {
      if (!kernel.active(i, j)) continue;
      const double k = kernel(i, j);
      for (int r = 0; r < img.height(); ++r) {
        const double* src = &padded.pixels()[static_cast<std::size_t>(r + i) * padded.width() + j];
        double* dst = &out.pixels()[static_cast<std::size_t>(r) * w];
        for (int c = 0; c < w; ++c) dst[c] = combine(dst[c], k + src[c]);
      }
    }
  }
  return out;
}

}  // namespace

Image classical_convolve(const Image& img, const Kernel& kernel, PaddingMode border) {
  check_fits(img, kernel);
  const int radius = kernel.radius();
  const Image padded = pad(img, radius, border);
  Image out(img.width(), img.height(), 0.0);
  const int w = img.width();
  double weight = 0.0;
  // Accumulate deviations from the centre pixel so flat regions stay exact.
  for (int i = 0; i < kernel.size(); ++i) {
    for (int j = 0; j < kernel.size(); ++j) {
      if (!kernel.active(i, j)) continue;
      const double k = kernel(i, j);
      weight += k;
      for (int r = 0; r < img.height(); ++r) {
        const double* src = &padded.pixels()[static_cast<std::size_t>(r + i) * padded.width() + j];
        const double* centre = &img.pixels()[static_cast<std::size_t>(r) * w];
        double* dst = &out.pixels()[static_cast<std::size_t>(r) * w];
        for (int c = 0; c < w; ++c) dst[c] += k * (src[c] - centre[c]);
      }
    }
  }
  for (std::size_t p = 0; p < out.size(); ++p) out.pixels()[p] += weight * img.pixels()[p];
  return out;
}

Image tropical_convolve(const Image& img, const Kernel& kernel, Semiring semiring,
                        PaddingMode border) {
  check_fits(img, kernel);
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (semiring == Semiring::MinPlus) {
    return tropical_pass(img, kernel, border, inf,
                         [](double a, double b) { return std::min(a, b); });
  }
  return tropical_pass(img, kernel, border, -inf,
                       [](double a, double b) { return std::max(a, b); });
}

Image tropical_gradient(const Image& img) {
  if (img.width() < 2 || img.height() < 2) {
    fail(ErrorCode::InvalidInput, "tropical gradient needs at least a 2x2 image");
  }
  Image out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      const double down = r + 1 < img.height() ? img(r + 1, c) - img(r, c) : 0.0;
      const double right = c + 1 < img.width() ? img(r, c + 1) - img(r, c) : 0.0;
      out(r, c) = std::min(down, right);
    }
  }
  return out;
}

Image fuse_bank(const Image& img, const KernelBank& bank, Semiring semiring, PaddingMode border) {
  Image fused = tropical_convolve(img, bank.kernels().front(), semiring, border);
  for (std::size_t k = 1; k < bank.size(); ++k) {
    const Image response = tropical_convolve(img, bank.kernels()[k], semiring, border);
    auto dst = fused.pixels();
    auto src = response.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = semiring == Semiring::MaxPlus ? std::max(dst[i], src[i]) : std::min(dst[i], src[i]);
    }
  }
  return fused;
}

namespace banks {

namespace {

Kernel deg0() { return Kernel::from_rows({{1, 1, 1}, {0, 0, 0}, {-1, -1, -1}}); }
Kernel deg90() { return Kernel::from_rows({{1, 0, -1}, {1, 0, -1}, {1, 0, -1}}); }
Kernel deg180() { return Kernel::from_rows({{-1, -1, -1}, {0, 0, 0}, {1, 1, 1}}); }
Kernel deg270() { return Kernel::from_rows({{-1, 0, 1}, {-1, 0, 1}, {-1, 0, 1}}); }
Kernel deg45() { return Kernel::from_rows({{2, 1, 0}, {1, 0, -1}, {0, -1, -2}}); }
Kernel deg135() { return Kernel::from_rows({{0, 1, 2}, {-1, 0, 1}, {-2, -1, 0}}); }
Kernel deg225() { return Kernel::from_rows({{-2, -1, 0}, {-1, 0, 1}, {0, 1, 2}}); }
Kernel deg315() { return Kernel::from_rows({{0, -1, -2}, {1, 0, -1}, {2, 1, 0}}); }

}  // namespace

KernelBank directional8() {
  return KernelBank("directional8",
                    {deg0(), deg90(), deg180(), deg270(), deg45(), deg135(), deg225(), deg315()});
}

KernelBank directional6() {
  return KernelBank("directional6", {deg0(), deg45(), deg90(), deg135(), deg180(), deg270()});
}

KernelBank hessian4() {
  return KernelBank("hessian4", {
                                    Kernel::from_rows({{1, 2, 1}, {0, -4, 0}, {-1, -2, -1}}),
                                    Kernel::from_rows({{1, 0, -1}, {2, -4, -2}, {1, 0, -1}}),
                                    Kernel::from_rows({{-1, -2, -1}, {0, -4, 0}, {1, 2, 1}}),
                                    Kernel::from_rows({{-1, 0, 1}, {-2, -4, 2}, {-1, 0, 1}}),
                                });
}

KernelBank by_name(std::string_view name) {
  if (name == "directional8") return directional8();
  if (name == "directional6") return directional6();
  if (name == "hessian4") return hessian4();
  fail(ErrorCode::InvalidInput, "unknown kernel bank '" + std::string(name) + "'");
}

}  // namespace banks

KernelBank parse_kernel_bank(std::string_view text, std::string name) {
  std::vector<Kernel> kernels;
  std::vector<std::vector<double>> rows;
  int line_no = 0;

  auto flush = [&] {
    if (rows.empty()) return;
    const auto n = rows.size();
    std::vector<double> coeffs;
    for (const auto& row : rows) {
      if (row.size() != n) {
        fail(ErrorCode::InvalidInput, "kernel ending at line " + std::to_string(line_no) +
                                          " in '" + name + "' is not square");
      }
      coeffs.insert(coeffs.end(), row.begin(), row.end());
    }
    kernels.emplace_back(static_cast<int>(n), std::move(coeffs));
    rows.clear();
  };

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    bool comment_only = false;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
      comment_only = line.find_first_not_of(" \t\r") == std::string::npos;
    }
    if (comment_only) continue;
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        fail(ErrorCode::InvalidInput, "bad number '" + tok + "' at line " +
                                          std::to_string(line_no) + " in '" + name + "'");
      }
    }
    if (row.empty()) {
      flush();
    } else {
      rows.push_back(std::move(row));
    }
  }
  flush();
  return KernelBank(std::move(name), std::move(kernels));
}

KernelBank load_kernel_bank(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open kernel file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_kernel_bank(text.str(), path.stem().string());
}

}  // namespace tropedge
