// Copyright 2026 The tgauss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tgauss/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "tgauss/normal.hpp"
#include "tgauss/oracle.hpp"

namespace tgauss {
namespace {

const RegionTable& table() {
  static const RegionTable t = build_table_for_stored(kDefaultStoredTarget);
  return t;
}

std::vector<double> draw(int n, const std::function<double()>& f) {
  std::vector<double> v(n);
  for (auto& x : v) x = f();
  return v;
}

void expect_ks(const std::vector<double>& xs, double a, double b) {
  for (double x : xs) ASSERT_TRUE(x >= a && x <= b) << x << " outside [" << a << ", " << b << "]";
  const auto r = oracle::ks_test(xs, [&](double x) { return oracle::exact_cdf_tn(a, b, x); });
  EXPECT_LT(r.statistic, r.critical) << "[" << a << ", " << b << "]";
}

TEST(InverseTransform, Values) {
  EXPECT_DOUBLE_EQ(inverse_transform(1.5, 1.0), 1.5);
  EXPECT_NEAR(inverse_transform(0.0, 0.5), 0.67448975, 1e-6);
  const double x = inverse_transform(20.0, 0.3);
  EXPECT_TRUE(std::isfinite(x));
  EXPECT_GE(x, 20.0);
  EXPECT_TRUE(std::isfinite(inverse_transform(37.0, 1e-3)));
  EXPECT_THROW(inverse_transform(40.0, 0.5), std::overflow_error);
  EXPECT_THROW(inverse_transform(0.0, 0.0), std::domain_error);
}

TEST(InverseTransform, Ks) {
  RandomStream s(11);
  expect_ks(draw(200000, [&] { return inverse_transform_sample(1.0, s); }), 1.0, kInf);
}

TEST(Devroye, KsAndRate) {
  RandomStream s(1);
  BranchCounters c;
  expect_ks(draw(1000000, [&] { return devroye(2.0, s, &c); }), 2.0, kInf);
  EXPECT_NEAR(c.acceptance(), oracle::devroye_rate(2.0), 0.01);
}

TEST(GewekeRobert, KsSupportAndRate) {
  RandomStream s(2);
  expect_ks(draw(1000000, [&] { return geweke_robert(0.0, s); }), 0.0, kInf);
  for (int k = 0; k < 10000; ++k) ASSERT_GE(geweke_robert(5.0, s), 5.0);
  BranchCounters gr, dv;
  for (int k = 0; k < 1000000; ++k) {
    geweke_robert(1.0, s, &gr);
    devroye(1.0, s, &dv);
  }
  EXPECT_GE(gr.acceptance(), dv.acceptance());
}

TEST(Naive, KsMeanAndGuard) {
  RandomStream s(3);
  expect_ks(draw(200000, [&] { return naive(-8.0, 8.0, s); }), -8.0, 8.0);
  double sum = 0.0;
  for (int k = 0; k < 1000000; ++k) sum += naive(0.0, kInf, s);
  EXPECT_NEAR(sum / 1e6, kSqrtTwoOverPi, 0.003);
  EXPECT_NO_THROW(naive(3.0, 3.1, s));
  EXPECT_THROW(naive(5.0, 5.1, s), std::domain_error);
  EXPECT_THROW(naive(9.0, kInf, s), std::domain_error);
}

TEST(TruncExp, KsAndUniformLimit) {
  RandomStream s(4);
  auto xs = draw(1000000, [&] { return trunc_exp(1.0, 2.0, 1.0, s); });
  for (double x : xs) ASSERT_TRUE(x >= 1.0 && x <= 2.0);
  const double z = -std::expm1(-1.0);
  auto r = oracle::ks_test(xs, [&](double x) { return -std::expm1(-(x - 1.0)) / z; });
  EXPECT_LT(r.statistic, r.critical);
  xs = draw(200000, [&] { return trunc_exp(-0.5, 0.5, 1e-14, s); });
  r = oracle::ks_test(xs, [](double x) { return x + 0.5; });
  EXPECT_LT(r.statistic, r.critical);
  xs = draw(200000, [&] { return trunc_exp(3.0, 4.0, -2.0, s); });
  for (double x : xs) ASSERT_TRUE(x >= 3.0 && x <= 4.0);
  r = oracle::ks_test(xs, [](double x) { return std::expm1(2.0 * (x - 3.0)) / std::expm1(2.0); });
  EXPECT_LT(r.statistic, r.critical);
}

TEST(SampleLower, KsAtZero) {
  RandomStream s(5);
  expect_ks(draw(1000000, [&] { return sample_lower(0.0, table(), s); }), 0.0, kInf);
}

TEST(SampleLower, KsGrid) {
  RandomStream s(6);
  for (double a : {-3.0, -2.0, -1.0, 0.65, 1.0, 2.0, 2.55, 3.0, 5.0, 9.5})
    expect_ks(draw(200000, [&] { return sample_lower(a, table(), s); }), a, kInf);
}

TEST(SampleLower, FastPathDominates) {
  RandomStream s(7);
  for (double a : {-2.0, -1.0, 0.0, 1.0}) {
    BranchCounters c;
    for (int k = 0; k < 200000; ++k) sample_lower(a, table(), s, &c);
    EXPECT_GE(double(c.fast_path) / double(c.accepted), 0.9) << "a = " << a;
    EXPECT_EQ(c.accepted, 200000u);
  }
}

TEST(SampleLower, FastPathUniformWithinRegion) {
  RandomStream s(8);
  const RegionTable& t = table();
  std::vector<std::uint64_t> counts(10, 0);
  for (int k = 0; k < 200000; ++k) {
    BranchCounters c;
    const double x = sample_lower(-1.0, t, s, &c);
    if (c.fast_path == 0) continue;
    const int i = t.region_of(x);
    const double frac = (x - t.edge(i)) / (t.edge(i + 1) - t.edge(i));
    ++counts[std::min(9, static_cast<int>(frac * 10.0))];
  }
  const auto r = oracle::chi2_test(counts, std::vector<double>(10, 0.1));
  EXPECT_GT(r.p_value, 1e-3);
}

TEST(SampleLower, FiniteFarInTail) {
  RandomStream s(9);
  for (double a = 10.0; a <= 30.0; a += 2.5)
    for (int k = 0; k < 1000; ++k) {
      const double x = sample_lower(a, table(), s);
      ASSERT_TRUE(std::isfinite(x));
      ASSERT_GE(x, a);
    }
}

TEST(SampleInterval, KsCases) {
  RandomStream s(10);
  const SamplerConfig cfg;
  const std::vector<std::pair<double, double>> cases = {
      {-1.0, 1.0}, {2.0, 2.01}, {-0.05, 0.05}, {-3.0, 2.5}, {-5.0, -4.0}, {2.5, 4.0},
      {5.0, 5.5},  {-1.9, 3.0}, {0.3, 0.9},    {-2.5, -1.0}, {1.0, 9.0}};
  for (auto [a, b] : cases) {
    const int n = (a == -1.0 && b == 1.0) ? 1000000 : 200000;
    expect_ks(draw(n, [&] { return sample_interval(a, b, table(), cfg, s); }), a, b);
  }
}

TEST(SampleInterval, NarrowIntervalUsesExponential) {
  RandomStream s(12);
  BranchCounters c;
  sample_interval(2.0, 2.01, table(), SamplerConfig{}, s, &c);
  EXPECT_EQ(c.fallback, 1u);
  EXPECT_THROW(sample_interval(1.0, 1.0, table(), SamplerConfig{}, s), std::invalid_argument);
}

TEST(SampleGeneral, AffineAndIdentity) {
  RandomStream s(13);
  const SamplerConfig cfg;
  double sum = 0.0;
  for (int k = 0; k < 1000000; ++k) {
    const double x = sample_general({3.0, kInf, 3.0, 2.0}, table(), cfg, s);
    ASSERT_GE(x, 3.0);
    sum += x;
  }
  EXPECT_NEAR(sum / 1e6, 3.0 + 2.0 * kSqrtTwoOverPi, 0.006);
  RandomStream s1(14), s2(14);
  for (int k = 0; k < 1000; ++k)
    ASSERT_EQ(sample_general({0.5, kInf, 0.0, 1.0}, table(), cfg, s1), sample_lower(0.5, table(), s2));
  EXPECT_THROW(sample_general({0.0, 1.0, 0.0, 0.0}, table(), cfg, s), std::invalid_argument);
  EXPECT_THROW(sample_general({1.0, 0.0, 0.0, 1.0}, table(), cfg, s), std::invalid_argument);
}

TEST(SampleGeneral, UpperTruncationByNegation) {
  RandomStream s(15);
  const SamplerConfig cfg;
  expect_ks(draw(200000, [&] { return sample_general({-kInf, 1.0, 0.0, 1.0}, table(), cfg, s); }), -kInf, 1.0);
  expect_ks(draw(200000, [&] { return -sample_lower(-1.0, table(), s); }), -kInf, 1.0);
}

TEST(Agreement, TwoSampleKs) {
  RandomStream s(16);
  for (double a : {0.65, 1.0, 2.0, 4.0}) {
    std::vector<std::vector<double>> sets;
    sets.push_back(draw(100000, [&] { return sample_lower(a, table(), s); }));
    sets.push_back(draw(100000, [&] { return devroye(a, s); }));
    sets.push_back(draw(100000, [&] { return geweke_robert(a, s); }));
    sets.push_back(draw(100000, [&] { return inverse_transform_sample(a, s); }));
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (std::size_t j = i + 1; j < sets.size(); ++j) {
        const auto r = oracle::ks_two_sample(sets[i], sets[j]);
        EXPECT_LT(r.statistic, r.critical) << "a = " << a << " pair " << i << "," << j;
      }
  }
}

TEST(Composites, Ks) {
  RandomStream s(17);
  const SamplerConfig cfg;
  for (double a : {-1.0, 0.3, 1.5}) {
    expect_ks(draw(200000, [&] { return devroye_composite(a, cfg, s); }), a, kInf);
    expect_ks(draw(200000, [&] { return geweke_robert_composite(a, s); }), a, kInf);
  }
}

}  // namespace
}  // namespace tgauss
