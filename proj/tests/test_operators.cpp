#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "tropedge/components.hpp"
#include "tropedge/operators.hpp"
#include "tropedge/tropical.hpp"

using namespace tropedge;
using namespace testing_support;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{0};
}

constexpr GradientOperator kAllOps[] = {GradientOperator::Roberts, GradientOperator::Prewitt,
                                        GradientOperator::Sobel};

ThresholdParams tg_canny_threshold() {
  ThresholdParams t;
  t.offset = kTropicalCannyOffset;
  return t;
}

double column_mean(const Image& img, int c) {
  double s = 0.0;
  for (int r = 0; r < img.height(); ++r) s += img(r, c);
  return s / img.height();
}

Image shifted(const Image& img, double by) {
  Image out = img;
  for (double& v : out.pixels()) v += by;
  return out;
}

/// Smooth blob scene with a step so detectors have something to find.
Image scene(std::mt19937_64& rng) {
  Image img = square_image(32, 28, 8, 9, 12, 0.2, 0.7);
  std::uniform_real_distribution<double> d(-0.02, 0.02);
  for (double& v : img.pixels()) v += d(rng);
  return img;
}

}  // namespace

TEST(GradientKernels, MatchPrintedMasks) {
  const auto [px, py] = gradient_kernels(GradientOperator::Prewitt);
  EXPECT_EQ(px, Kernel::from_rows({{1, 1, 1}, {0, 0, 0}, {-1, -1, -1}}));
  EXPECT_EQ(py, Kernel::from_rows({{-1, 0, 1}, {-1, 0, 1}, {-1, 0, 1}}));
  const auto [sx, sy] = gradient_kernels(GradientOperator::Sobel);
  EXPECT_EQ(sx, Kernel::from_rows({{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}}));
  EXPECT_EQ(sy, sx.transposed());
  const auto [rx, ry] = gradient_kernels(GradientOperator::Roberts);
  ASSERT_EQ(rx.size(), 3);
  // 2x2 mask in the lower-right quadrant, upper-left cell on the anchor.
  EXPECT_EQ(rx(1, 1), 1.0);
  EXPECT_EQ(rx(1, 2), 0.0);
  EXPECT_EQ(rx(2, 1), 0.0);
  EXPECT_EQ(rx(2, 2), -1.0);
  EXPECT_EQ(ry(1, 1), 0.0);
  EXPECT_EQ(ry(1, 2), 1.0);
  EXPECT_EQ(ry(2, 1), -1.0);
  EXPECT_EQ(ry(2, 2), 0.0);
  for (int i = 0; i < 3; ++i) {
    EXPECT_FALSE(rx.active(0, i));
    EXPECT_FALSE(rx.active(i, 0));
  }
}

TEST(ClassicalGradient, ConstantGivesZero) {
  for (auto op : kAllOps) {
    const auto g = classical_gradient(Image(6, 6, 0.4), op);
    EXPECT_EQ(g.gx, Image(6, 6, 0.0));
    EXPECT_EQ(g.gy, Image(6, 6, 0.0));
  }
}

TEST(ClassicalGradient, SobelVerticalStepHandOracle) {
  const Image step = vertical_step(8, 6, 4);
  const auto g = classical_gradient(step, GradientOperator::Sobel);
  for (int r = 1; r < 5; ++r) {
    // The column-differentiating kernel (the transpose) sees 1+2+1 across the step.
    EXPECT_EQ(std::abs(g.gy(r, 3)), 4.0);
    EXPECT_EQ(std::abs(g.gy(r, 4)), 4.0);
    for (int c = 0; c < 8; ++c) EXPECT_EQ(g.gx(r, c), 0.0);
    EXPECT_EQ(g.gy(r, 1), 0.0);
    EXPECT_EQ(g.gy(r, 6), 0.0);
  }
}

TEST(ClassicalGradient, RobertsDiagonalConcentratesOnDiagonal) {
  Image img(10, 10, 0.0);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) img(r, c) = r + c > 9 ? 1.0 : 0.0;
  const auto g = classical_gradient(img, GradientOperator::Roberts);
  double on = 0.0;
  double off = 0.0;
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) (std::abs(r + c - 8.5) <= 1.5 ? on : off) += std::abs(g.gx(r, c));
  EXPECT_GT(on, 0.0);
  EXPECT_EQ(off, 0.0);
}

TEST(ClassicalGradient, MatchesNaiveClassicalConvolution) {
  std::mt19937_64 rng(50);
  const Image img = random_image(rng, 9, 8);
  for (auto op : kAllOps) {
    const auto [kx, ky] = gradient_kernels(op);
    const auto g = classical_gradient(img, op);
    EXPECT_LT(max_abs_diff(g.gx, naive_classical(img, kx, true)), 1e-12);
    EXPECT_LT(max_abs_diff(g.gy, naive_classical(img, ky, true)), 1e-12);
  }
}

TEST(GradientMagnitude, Examples) {
  const GradientPair p{Image::from_rows({{3, 0}}), Image::from_rows({{4, 0}})};
  EXPECT_EQ(gradient_magnitude(p), Image::from_rows({{5, 0}}));
  std::mt19937_64 rng(51);
  const GradientPair q{random_image(rng, 5, 5, -2, 2), random_image(rng, 5, 5, -2, 2)};
  const Image m = gradient_magnitude(q);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double gx = q.gx.pixels()[i];
    const double gy = q.gy.pixels()[i];
    EXPECT_NEAR(m.pixels()[i], std::sqrt(gx * gx + gy * gy), 1e-12);
    EXPECT_GE(m.pixels()[i], std::max(std::abs(gx), std::abs(gy)));
  }
}

TEST(GradientMagnitude, SobelCommutesWithTranspose) {
  std::mt19937_64 rng(52);
  const Image img = random_image(rng, 11, 7);
  const Image a = transpose(gradient_magnitude(classical_gradient(img, GradientOperator::Sobel)));
  const Image b = gradient_magnitude(classical_gradient(transpose(img), GradientOperator::Sobel));
  EXPECT_LT(max_abs_diff(a, b), 1e-12);
}

TEST(LogOperator, KernelSumsToZeroAndHasSize) {
  for (double sigma : {0.5, 1.0, 1.7, 2.5}) {
    const Kernel k = log_kernel(sigma);
    EXPECT_EQ(k.size(), 2 * static_cast<int>(std::ceil(3 * sigma)) + 1);
    double s = 0.0;
    for (double v : k.coeffs()) s += v;
    EXPECT_NEAR(s, 0.0, 1e-8);
    EXPECT_LT(k(k.radius(), k.radius()), 0.0);
  }
}

TEST(LogOperator, ConstantHasNoCrossings) {
  EXPECT_EQ(log_detect(Image(16, 16, 0.5), 1.0), Image(16, 16, 0.0));
}

TEST(LogOperator, StepCrossingLocalised) {
  const Image step = vertical_step(24, 16, 12);
  const Image e = log_detect(step, 1.0);
  for (int r = 4; r < 12; ++r) {
    bool near = false;
    for (int c = 0; c < 24; ++c) {
      if (e(r, c) == 0.0) continue;
      EXPECT_LE(std::abs(c - 11.5), 1.5) << "row " << r << " col " << c;
      near = true;
    }
    EXPECT_TRUE(near) << "row " << r;
  }
}

TEST(Canny, ConstantIsEmpty) {
  EXPECT_EQ(canny_detect(Image(16, 16, 0.3), {}).count(), 0u);
}

TEST(Canny, StepGivesSingleVerticalLine) {
  const Image step = vertical_step(24, 20, 12);
  const EdgeMap e = canny_detect(step, {1.0, 0.1, 0.2});
  for (int r = 3; r < 17; ++r) {
    int n = 0;
    for (int c = 0; c < 24; ++c) {
      if (!e(r, c)) continue;
      ++n;
      EXPECT_TRUE(c == 11 || c == 12);
    }
    EXPECT_EQ(n, 1) << "row " << r;
  }
}

TEST(Canny, LowerLowIsSuperset) {
  std::mt19937_64 rng(53);
  const Image img = random_image(rng, 24, 24);
  for (double high : {0.3, 0.5}) {
    EdgeMap prev = canny_detect(img, {1.0, high - 0.01, high});
    for (double low = high - 0.05; low > 0.0; low -= 0.05) {
      const EdgeMap cur = canny_detect(img, {1.0, low, high});
      EXPECT_TRUE(subset(prev, cur));
      prev = cur;
    }
  }
}

TEST(Canny, InvalidParamsRejected) {
  EXPECT_EQ(code_of([] { canny_detect(Image(8, 8), {1.0, 0.5, 0.4}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { canny_detect(Image(8, 8), {0.0, 0.1, 0.2}); }), ErrorCode::InvalidInput);
}

TEST(Hysteresis, GrowsOnlyFromStrongSeeds) {
  const Image resp = Image::from_rows({{0.9, 0.5, 0.5, 0.0, 0.5}});
  const EdgeMap e = hysteresis(resp, Image(5, 1, 0.4), Image(5, 1, 0.8));
  EXPECT_EQ(e, map_from({{1, 1, 1, 0, 0}}));
}

TEST(NonMaxSuppression, OutputSubsetOfPositiveResponse) {
  std::mt19937_64 rng(54);
  const Image img = random_image(rng, 20, 20);
  const auto g = classical_gradient(img, GradientOperator::Sobel);
  const Image mag = gradient_magnitude(g);
  const Image nms = non_max_suppression(mag, g);
  for (std::size_t i = 0; i < mag.size(); ++i) {
    if (nms.pixels()[i] == 0.0) continue;
    EXPECT_EQ(nms.pixels()[i], mag.pixels()[i]);
  }
}

TEST(TropicalGradientDetect, ConstantIsFlat) {
  for (auto op : kAllOps) EXPECT_EQ(tg_gradient_detect(Image(8, 8, 0.3), op), Image(8, 8, 0.0));
}

TEST(TropicalGradientDetect, StepStrongerThanFlats) {
  // Falling step: the lower-right Roberts mask only sees drops toward larger indices.
  const Image step = vertical_step(20, 12, 10, 1.0, 0.0);
  for (auto op : kAllOps) {
    const Image out = tg_gradient_detect(step, op);
    const double on = std::max(column_mean(out, 9), column_mean(out, 10));
    EXPECT_GT(on, column_mean(out, 2));
    EXPECT_GT(on, column_mean(out, 17));
  }
}

TEST(TropicalGradientDetect, ShiftInvariant) {
  std::mt19937_64 rng(55);
  const Image img = scene(rng);
  for (auto op : kAllOps)
    for (double c : {-0.2, 0.25, 3.0})
      EXPECT_LT(max_abs_diff(tg_gradient_detect(img, op), tg_gradient_detect(shifted(img, c), op)), 1e-12);
}

TEST(TropicalLogDetect, ConstantFlatAndStepPeak) {
  EXPECT_EQ(tg_log_detect(Image(16, 16, 0.7), 1.0), Image(16, 16, 0.0));
  const Image step = vertical_step(24, 16, 12);
  const Image out = tg_log_detect(step, 1.0);
  std::vector<double> cols(24);
  for (int c = 0; c < 24; ++c) cols[c] = column_mean(out, c);
  const int peak = static_cast<int>(std::max_element(cols.begin(), cols.end()) - cols.begin());
  EXPECT_LE(std::abs(peak - 11.5), 1.5);
}

TEST(TropicalLogDetect, ShiftInvariant) {
  std::mt19937_64 rng(56);
  const Image img = scene(rng);
  EXPECT_LT(max_abs_diff(tg_log_detect(img, 1.0), tg_log_detect(shifted(img, 0.17), 1.0)), 1e-12);
}

TEST(TropicalSmooth, ConeErosionOracle) {
  std::mt19937_64 rng(57);
  const Image img = random_image(rng, 10, 10);
  const Image s = tropical_smooth(img, 1.0);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) {
      double m = img(r, c);
      for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
          m = std::min(m, fetch(img, r + i, c + j, true) + kTropicalConeSlope * std::hypot(i, j));
      EXPECT_NEAR(s(r, c), m, 1e-12);
    }
}

TEST(TropicalCanny, ConstantIsEmpty) {
  EXPECT_EQ(tg_canny_detect(Image(20, 20, 0.5), {}, tg_canny_threshold()).count(), 0u);
}

TEST(TropicalCanny, StepIsThinAndConnected) {
  const Image step = vertical_step(40, 30, 20);
  const EdgeMap e = tg_canny_detect(step, {}, tg_canny_threshold());
  ASSERT_GT(e.count(), 0u);
  const auto sizes = flood_sizes(e);
  const double total = static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
  EXPECT_GE(static_cast<double>(sizes.back()) / total, 0.9);
  for (int r = 0; r < 30; ++r) {
    int n = 0;
    for (int c = 0; c < 40; ++c) {
      if (!e(r, c)) continue;
      ++n;
      EXPECT_LE(std::abs(c - 19.5), 1.5);
    }
    EXPECT_LE(n, 1) << "row " << r;
  }
}

TEST(TropicalCanny, StagesNestAndEdgesSubsetOfSuppressed) {
  std::mt19937_64 rng(58);
  const Image img = scene(rng);
  const auto st = tg_canny_stages(img, {}, tg_canny_threshold());
  EXPECT_EQ(st.edges, tg_canny_detect(img, {}, tg_canny_threshold()));
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) {
      if (st.suppressed(r, c) != 0.0) EXPECT_EQ(st.suppressed(r, c), st.strength(r, c));
      if (st.edges(r, c)) {
        EXPECT_GT(st.suppressed(r, c), 0.0);
        EXPECT_GE(st.suppressed(r, c), st.low(r, c));
      }
      EXPECT_NEAR(st.low(r, c), kAdaptiveLowRatio * st.high(r, c), 1e-15);
    }
}
