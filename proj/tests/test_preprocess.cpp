#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "tropedge/preprocess.hpp"

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

Image naive_bilateral(const Image& img, const BilateralParams& p) {
  Image out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) {
      double num = 0.0;
      double den = 0.0;
      for (int i = -p.radius; i <= p.radius; ++i)
        for (int j = -p.radius; j <= p.radius; ++j) {
          const double v = fetch(img, r + i, c + j, true);
          const double dv = v - img(r, c);
          const double wt = std::exp(-(i * i + j * j) / (2 * p.sigma_spatial * p.sigma_spatial)) *
                            std::exp(-dv * dv / (2 * p.sigma_range * p.sigma_range));
          num += wt * v;
          den += wt;
        }
      out(r, c) = num / den;
    }
  return out;
}

/// Single-row ramp 0 .. 1 in steps of 0.25 flanked by plateaus, repeated on every row.
Image ramp_step(int rows) {
  const std::vector<double> row{0, 0, 0, 0, 0, 0.25, 0.5, 0.75, 1, 1, 1, 1, 1};
  Image img(static_cast<int>(row.size()), rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < img.width(); ++c) img(r, c) = row[c];
  return img;
}

}  // namespace

TEST(Bilateral, ConstantUnchanged) {
  const Image flat(9, 7, 0.37);
  EXPECT_LT(max_abs_diff(bilateral_filter(flat, {}), flat), 1e-12);
}

TEST(Bilateral, StepEdgePreserved) {
  const Image step = vertical_step(12, 6, 6);
  const Image out = bilateral_filter(step, {2.0, 0.05, 3});
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 12; ++c) EXPECT_LT(std::abs(out(r, c) - step(r, c)), 0.05);
}

TEST(Bilateral, MatchesNaiveOracle) {
  std::mt19937_64 rng(30);
  for (int t = 0; t < 10; ++t) {
    const Image img = random_image(rng, 6, 6);
    const BilateralParams p{1.5, 0.2, 2};
    EXPECT_LT(max_abs_diff(bilateral_filter(img, p), naive_bilateral(img, p)), 1e-12);
  }
}

TEST(Bilateral, OutputWithinInputRange) {
  std::mt19937_64 rng(31);
  const Image img = random_image(rng, 20, 15, 0.2, 0.8);
  const Range in = value_range(img);
  const Range out = value_range(bilateral_filter(img, {3.0, 0.3, 5}));
  EXPECT_GE(out.min, in.min);
  EXPECT_LE(out.max, in.max);
}

TEST(Bilateral, InvalidParamsRejected) {
  const Image img(5, 5);
  EXPECT_EQ(code_of([&] { bilateral_filter(img, {0.0, 0.1, 3}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([&] { bilateral_filter(img, {1.0, -0.1, 3}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([&] { bilateral_filter(img, {1.0, 0.1, 0}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([&] { bilateral_filter(img, {1.0, 0.1, 8}); }), ErrorCode::InvalidInput);
}

TEST(Shock, ConstantUnchangedAndZeroLambdaIdentity) {
  const Image flat(8, 8, 0.6);
  EXPECT_EQ(shock_filter(flat, {0.9, 20}), flat);
  std::mt19937_64 rng(32);
  const Image img = random_image(rng, 10, 10);
  EXPECT_EQ(shock_filter(img, {0.0, 5}), img);
}

TEST(Shock, RampBecomesSharper) {
  const Image in = ramp_step(9);
  const Image out = shock_filter(in, {0.5, 10});
  const int mid = 4;
  auto transition = [&](const Image& img) {
    int n = 0;
    for (int c = 0; c < img.width(); ++c) n += img(mid, c) > 0.05 && img(mid, c) < 0.95;
    return n;
  };
  auto diff_variance = [&](const Image& img) {
    std::vector<double> d;
    for (int c = 1; c < img.width(); ++c) d.push_back(img(mid, c) - img(mid, c - 1));
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    return var / static_cast<double>(d.size());
  };
  EXPECT_LT(transition(out), transition(in));
  EXPECT_GT(diff_variance(out), diff_variance(in));
  const Range r = value_range(out);
  EXPECT_GE(r.min, 0.0);
  EXPECT_LE(r.max, 1.0);
}

TEST(Shock, InvalidParamsRejected) {
  const Image img(5, 5);
  EXPECT_EQ(code_of([&] { shock_filter(img, {1.5, 5}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([&] { shock_filter(img, {0.3, 0}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([&] { shock_filter(img, {0.3, 51}); }), ErrorCode::InvalidInput);
}

TEST(ScalePairOp, Dimensions) {
  const auto [a, b] = make_scale_pair(Image(400, 300), {0.5, 2.0});
  EXPECT_EQ(a.width(), 200);
  EXPECT_EQ(a.height(), 150);
  EXPECT_EQ(b.width(), 800);
  EXPECT_EQ(b.height(), 600);
  const auto [c, d] = make_scale_pair(Image(10, 10), {0.9, 1.1});
  EXPECT_EQ(c.width(), 9);
  EXPECT_EQ(d.width(), 11);
}

TEST(ScalePairOp, ConstantStaysConstant) {
  const auto [a, b] = make_scale_pair(Image(9, 7, 0.3), {0.5, 1.5});
  EXPECT_EQ(a, Image(a.width(), a.height(), 0.3));
  EXPECT_EQ(b, Image(b.width(), b.height(), 0.3));
}

TEST(ScalePairOp, InvalidRejected) {
  EXPECT_EQ(code_of([] { make_scale_pair(Image(8, 8), {1.0, 1.5}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { make_scale_pair(Image(8, 8), {0.5, 1.0}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { make_scale_pair(Image(8, 8), {0.0, 2.0}); }), ErrorCode::InvalidInput);
}

TEST(MergeScales, SingleAndDuplicate) {
  std::mt19937_64 rng(33);
  const Image img = random_image(rng, 8, 6);
  EXPECT_EQ(merge_scales({img}, 8, 6), img);
  EXPECT_EQ(merge_scales({img, img}, 8, 6), img);
  EXPECT_EQ(code_of([] { merge_scales({}, 4, 4); }), ErrorCode::InvalidInput);
}

TEST(MergeScales, PerPixelMaxAfterResizeAndCommutative) {
  std::mt19937_64 rng(34);
  const Image a = random_image(rng, 4, 3);
  const Image b = random_image(rng, 12, 9);
  const Image m = merge_scales({a, b}, 8, 6);
  const Image ra = resize_to(a, 8, 6);
  const Image rb = resize_to(b, 8, 6);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 8; ++c) EXPECT_EQ(m(r, c), std::max(ra(r, c), rb(r, c)));
  EXPECT_EQ(merge_scales({b, a}, 8, 6), m);
}
