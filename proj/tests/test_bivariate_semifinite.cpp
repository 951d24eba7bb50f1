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

#include "tgauss/bivariate_semifinite.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"
#include "tgauss/normal.hpp"
#include "tgauss/oracle.hpp"

namespace tgauss {
namespace {

using testing::default_table;

struct Params {
  double rho, a1, a2;
};

// Random problem whose canonical form falls in case c.
Params random_problem(SemiCase c, RandomStream& s) {
  while (true) {
    const Params p{-0.99 + 1.98 * s.uniform(), 3.0 * s.normal(), 3.0 * s.normal()};
    if (p.rho == 0.0) continue;
    if (classify(make_semifinite(p.rho, p.a1, p.a2)) == c) return p;
  }
}

double empirical_rate(SemiFiniteSampler& sm, int n, RandomStream& s) {
  int acc = 0;
  for (int k = 0; k < n; ++k) acc += sm.propose(s).accepted;
  return double(acc) / n;
}

TEST(SemiClassify, Examples) {
  EXPECT_EQ(classify(make_semifinite(0.5, 1.0, 0.0)), SemiCase::SPlus);
  EXPECT_EQ(classify(make_semifinite(-0.5, -1.0, -2.0)), SemiCase::SPlus);
  EXPECT_EQ(classify(make_semifinite(-0.5, 0.0, -1.0)), SemiCase::MMinus);
  EXPECT_EQ(classify(make_semifinite(-0.5, 0.0, 1.0)), SemiCase::SMinus);
  EXPECT_EQ(classify(make_semifinite(0.9, 1.0, 0.95)), SemiCase::MPlus);
  EXPECT_NEAR(kOneThirdQuantile, Phi_inv(1.0 / 3.0), 1e-15);
}

TEST(SemiClassify, PartitionMatchesRules) {
  RandomStream s(41);
  for (int k = 0; k < 1000000; ++k) {
    const auto p = make_semifinite(-0.999 + 1.998 * s.uniform(), 2.0 * s.normal(), 2.0 * s.normal());
    ASSERT_GE(p.a1, p.a2);
    const double m = p.rho * p.a1 - p.a2;
    const int hits = int(p.rho >= 0 && m >= 0) + int(p.rho < 0 && p.a1 <= kOneThirdQuantile) +
                     int(p.rho < 0 && m <= 0 && p.a1 > kOneThirdQuantile) + int(p.rho >= 0 && m < 0) +
                     int(p.rho < 0 && m > 0 && p.a1 > kOneThirdQuantile);
    ASSERT_EQ(hits, 1);
    const SemiCase c = classify(p);
    if (p.rho >= 0) ASSERT_EQ(c, m >= 0 ? SemiCase::SPlus : SemiCase::MPlus);
    else if (p.a1 <= kOneThirdQuantile) ASSERT_EQ(c, SemiCase::SPlus);
    else ASSERT_EQ(c, m <= 0 ? SemiCase::SMinus : SemiCase::MMinus);
  }
}

TEST(SemiProblem, RejectsDegenerate) {
  EXPECT_THROW(make_semifinite(1.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(make_semifinite(-1.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(make_semifinite(0.5, std::nan(""), 0.0), std::invalid_argument);
}

TEST(SemiSampler, SwapRoundTripAndSupport) {
  RandomStream s(42);
  SemiFiniteSampler sm(0.4, -0.5, 1.5, default_table());
  EXPECT_TRUE(sm.problem().swapped);
  double m1 = 0.0, m2 = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const auto [x1, x2] = sm.sample(s);
    ASSERT_GE(x1, -0.5);
    ASSERT_GE(x2, 1.5);
    m1 += x1, m2 += x2;
  }
  EXPECT_GT(m2, m1);
}

TEST(SemiSampler, SPlusLimits) {
  // Joint scheme with nearly zero correlation accepts half of the proposals.
  const auto near_zero = oracle::semifinite_acceptance(1e-9, 0.0, 0.0);
  EXPECT_EQ(near_zero.label, "S+");
  EXPECT_NEAR(near_zero.rate, 0.5, 1e-8);
  RandomStream s(43);
  SemiFiniteSampler sm(1e-9, 0.0, 0.0, default_table());
  EXPECT_NEAR(empirical_rate(sm, 100000, s), 0.5, 3.0 * std::sqrt(0.25 / 1e5));
  const auto corner = oracle::semifinite_acceptance(-0.999999, kOneThirdQuantile, kOneThirdQuantile);
  EXPECT_EQ(corner.label, "S+");
  EXPECT_NEAR(corner.rate, 0.5, 0.01);
}

TEST(SemiSampler, IndependentWhenRhoZero) {
  RandomStream s(44);
  SemiFiniteSampler sm(0.0, 0.3, -0.7, default_table());
  EXPECT_TRUE(sm.independent());
  std::vector<double> x1, x2;
  for (int k = 0; k < 100000; ++k) {
    const auto [u, v] = sm.sample(s);
    x1.push_back(u), x2.push_back(v);
  }
  EXPECT_TRUE(oracle::ks_test(x1, [](double x) { return oracle::exact_cdf_tn(0.3, kInf, x); }).pass());
  EXPECT_TRUE(oracle::ks_test(x2, [](double x) { return oracle::exact_cdf_tn(-0.7, kInf, x); }).pass());
}

TEST(SemiSampler, BoundaryTightness) {
  // S-: acceptance probability at x1 = a1 is psi(-w0)/c(w0) <= 1.
  SemiFiniteSampler sm(-0.6, 0.2, 0.5, default_table());
  ASSERT_EQ(sm.label(), SemiCase::SMinus);
  const auto& p = sm.problem();
  const double w0 = (p.rho * p.a1 - p.a2) / p.nu;
  EXPECT_NEAR(sm.target(p.a1) / sm.envelope(p.a1), psi(-w0) / c_fun(w0), 1e-12);
  // M-: component 2 accepts with probability one at the split point.
  SemiFiniteSampler mm(-0.5, 0.0, -1.0, default_table());
  ASSERT_EQ(mm.label(), SemiCase::MMinus);
  const double split = mm.problem().a2 / mm.problem().rho;
  const double right = std::nextafter(split, kInf);
  EXPECT_NEAR(mm.target(right) / mm.envelope(right), 1.0, 1e-12);
  // M+: the tilted bound is attained somewhere on the tilted piece.
  SemiFiniteSampler mp(0.5, 1.0, 0.8, default_table());
  ASSERT_EQ(mp.label(), SemiCase::MPlus);
  const double lo = mp.problem().a1, hi = mp.problem().a2 / mp.problem().rho;
  double best = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    const double x = lo + (hi - lo) * k / 10000.0;
    best = std::max(best, mp.target(x) / mp.envelope(x));
  }
  EXPECT_LE(best, 1.0 + 1e-12);
  EXPECT_GT(best, 0.999);
}

TEST(SemiSampler, EnvelopeDominatesOnRandomGrid) {
  RandomStream s(45);
  for (SemiCase c : {SemiCase::SPlus, SemiCase::SMinus, SemiCase::MPlus, SemiCase::MMinus}) {
    for (int k = 0; k < 200; ++k) {
      const Params q = random_problem(c, s);
      SemiFiniteSampler sm(q.rho, q.a1, q.a2, default_table());
      const double a1 = sm.problem().a1;
      for (int g = 0; g < 500; ++g) {
        const double x = a1 + 8.0 * s.uniform() * s.uniform();
        const double t = sm.target(x), e = sm.envelope(x);
        ASSERT_LE(t, e * (1.0 + 1e-12)) << to_string(c) << " rho=" << q.rho << " a=(" << q.a1 << "," << q.a2
                                        << ") x=" << x;
      }
    }
  }
}

TEST(SemiSampler, AcceptProbabilitiesInUnitInterval) {
  RandomStream s(46);
  for (SemiCase c : {SemiCase::SPlus, SemiCase::SMinus, SemiCase::MPlus, SemiCase::MMinus}) {
    const Params q = random_problem(c, s);
    SemiFiniteSampler sm(q.rho, q.a1, q.a2, default_table());
    for (int k = 0; k < 20000; ++k) {
      const auto r = sm.propose(s, true);
      ASSERT_GE(r.accept_prob, 0.0);
      ASSERT_LE(r.accept_prob, 1.0 + 1e-12);
    }
  }
}

TEST(SemiSampler, ListedRatesMatchOracle) {
  RandomStream s(47);
  for (Params q : {Params{-0.8, 0.0, -3.0}, Params{-0.5, 0.0, -1.0}, Params{0.9, 1.0, 0.95}}) {
    SemiFiniteSampler sm(q.rho, q.a1, q.a2, default_table());
    const auto o = oracle::semifinite_acceptance(q.rho, q.a1, q.a2);
    ASSERT_TRUE(o.converged);
    EXPECT_EQ(o.label, to_string(sm.label()));
    EXPECT_NEAR(empirical_rate(sm, 100000, s), o.rate, 0.02);
  }
}

TEST(SemiSampler, RatesWithinThreeStandardErrors) {
  RandomStream s(48);
  for (SemiCase c : {SemiCase::SPlus, SemiCase::SMinus, SemiCase::MPlus, SemiCase::MMinus}) {
    for (int k = 0; k < 5; ++k) {
      const Params q = random_problem(c, s);
      SemiFiniteSampler sm(q.rho, q.a1, q.a2, default_table());
      const auto o = oracle::semifinite_acceptance(q.rho, q.a1, q.a2);
      ASSERT_TRUE(o.converged);
      ASSERT_EQ(o.label, to_string(c));
      const double se = std::sqrt(o.rate * (1.0 - o.rate) / 1e5);
      EXPECT_NEAR(empirical_rate(sm, 100000, s), o.rate, 3.0 * se + 1e-9)
          << to_string(c) << " rho=" << q.rho << " a=(" << q.a1 << "," << q.a2 << ")";
    }
  }
}

TEST(SemiSampler, MixtureComponentFrequency) {
  RandomStream s(49);
  for (Params q : {Params{-0.5, 0.0, -1.0}, Params{0.9, 1.0, 2.5}}) {
    SemiFiniteSampler sm(q.rho, q.a1, q.a2, default_table());
    EXPECT_GE(sm.weights().w1, 0.0);
    EXPECT_GE(sm.weights().w2, 0.0);
    int first = 0;
    for (int k = 0; k < 100000; ++k) first += sm.propose(s).component == 1;
    EXPECT_NEAR(first / 1e5, sm.weights().p1, 0.01);
  }
}

TEST(SemiSampler, ChiSquareGrid) {
  RandomStream s(50);
  const std::vector<Params> problems = {{0.5, 1.0, 0.0},   {-0.5, -1.0, -2.0}, {-0.6, 0.2, 0.5}, {-0.3, 1.0, 1.2},
                                        {0.9, 1.0, 0.95},  {0.6, -0.5, 1.5},   {-0.5, 0.0, -1.0},
                                        {-0.9, 1.5, -2.0}, {0.99, 2.0, 1.9},   {0.0, 0.5, -0.5}};
  for (const Params& q : problems) {
    SemiFiniteSampler sm(q.rho, q.a1, q.a2, default_table());
    const double p = testing::chi2_grid_pvalue(q.rho, q.a1, kInf, q.a2, kInf, 200000, [&] { return sm.sample(s); });
    EXPECT_GT(p, 1e-3) << to_string(sm.label()) << " rho=" << q.rho << " a=(" << q.a1 << "," << q.a2 << ")";
  }
}

TEST(SemiSampler, RandomProblemsStayAboveHalf) {
  RandomStream s(51);
  double worst = 1.0;
  for (int k = 0; k < 1000; ++k) {
    SemiFiniteSampler sm(-1.0 + 2.0 * s.uniform(), s.normal(), s.normal(), default_table());
    double sum = 0.0;
    for (int j = 0; j < 1000; ++j) sum += sm.propose(s, true).accept_prob;
    worst = std::min(worst, sum / 1000.0);
  }
  EXPECT_GE(worst, 0.5 - 3.0 * 0.016);
}

}  // namespace
}  // namespace tgauss
