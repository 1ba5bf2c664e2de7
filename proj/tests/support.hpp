#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tropedge/image.hpp"

namespace testing_support {

using tropedge::EdgeMap;
using tropedge::Image;
using tropedge::Kernel;

inline Image random_image(std::mt19937_64& rng, int w, int h, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Image img(w, h);
  for (double& v : img.pixels()) v = d(rng);
  return img;
}

/// Integer-valued image so sums and differences stay exact.
inline Image random_int_image(std::mt19937_64& rng, int w, int h, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  Image img(w, h);
  for (double& v : img.pixels()) v = d(rng);
  return img;
}

inline Kernel random_kernel(std::mt19937_64& rng, int size, int lo = -4, int hi = 4) {
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<double> k(static_cast<std::size_t>(size) * size);
  for (double& v : k) v = d(rng);
  return Kernel(size, std::move(k));
}

/// Pixel fetch with the border rule applied by hand.
inline double fetch(const Image& img, int r, int c, bool replicate) {
  if (r < 0 || r >= img.height() || c < 0 || c >= img.width()) {
    if (!replicate) return 0.0;
    r = std::clamp(r, 0, img.height() - 1);
    c = std::clamp(c, 0, img.width() - 1);
  }
  return img(r, c);
}

inline Image naive_classical(const Image& img, const Kernel& k, bool replicate) {
  const int rad = k.size() / 2;
  Image out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) {
      double acc = 0.0;
      for (int i = 0; i < k.size(); ++i)
        for (int j = 0; j < k.size(); ++j)
          if (k.active(i, j)) acc += k(i, j) * fetch(img, r + i - rad, c + j - rad, replicate);
      out(r, c) = acc;
    }
  return out;
}

inline Image naive_tropical(const Image& img, const Kernel& k, bool min_plus, bool replicate) {
  const int rad = k.size() / 2;
  Image out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) {
      double best = min_plus ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      for (int i = 0; i < k.size(); ++i)
        for (int j = 0; j < k.size(); ++j) {
          if (!k.active(i, j)) continue;
          const double v = k(i, j) + fetch(img, r + i - rad, c + j - rad, replicate);
          best = min_plus ? std::min(best, v) : std::max(best, v);
        }
      out(r, c) = best;
    }
  return out;
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
  return m;
}

/// Filled square of value `fg` on `bg`, rows/cols [top, top+side).
inline Image square_image(int w, int h, int top, int left, int side, double bg = 0.0, double fg = 1.0) {
  Image img(w, h, bg);
  for (int r = top; r < top + side; ++r)
    for (int c = left; c < left + side; ++c) img(r, c) = fg;
  return img;
}

/// Left half `lo`, right half from column `split` onward `hi`.
inline Image vertical_step(int w, int h, int split, double lo = 0.0, double hi = 1.0) {
  Image img(w, h, lo);
  for (int r = 0; r < h; ++r)
    for (int c = split; c < w; ++c) img(r, c) = hi;
  return img;
}

inline EdgeMap map_from(const std::vector<std::vector<int>>& rows) {
  EdgeMap e(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int r = 0; r < e.height(); ++r)
    for (int c = 0; c < e.width(); ++c) e.set(r, c, rows[r][c] != 0);
  return e;
}

inline bool subset(const EdgeMap& a, const EdgeMap& b) {
  for (int r = 0; r < a.height(); ++r)
    for (int c = 0; c < a.width(); ++c)
      if (a(r, c) && !b(r, c)) return false;
  return true;
}

/// Independent 4-pass BFS flood fill returning component sizes (8-connected).
inline std::vector<std::size_t> flood_sizes(const EdgeMap& e) {
  std::vector<int> seen(static_cast<std::size_t>(e.width()) * e.height(), 0);
  std::vector<std::size_t> sizes;
  for (int r = 0; r < e.height(); ++r)
    for (int c = 0; c < e.width(); ++c) {
      if (!e(r, c) || seen[r * e.width() + c]) continue;
      std::vector<std::pair<int, int>> frontier{{r, c}};
      seen[r * e.width() + c] = 1;
      std::size_t n = 0;
      for (std::size_t q = 0; q < frontier.size(); ++q) {
        ++n;
        const auto [y, x] = frontier[q];
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = y + dy;
            const int nx = x + dx;
            if (ny < 0 || nx < 0 || ny >= e.height() || nx >= e.width()) continue;
            if (!e(ny, nx) || seen[ny * e.width() + nx]) continue;
            seen[ny * e.width() + nx] = 1;
            frontier.emplace_back(ny, nx);
          }
      }
      sizes.push_back(n);
    }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

}  // namespace testing_support
