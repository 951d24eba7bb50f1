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
#include "tgauss/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "tgauss/normal.hpp"
#include "tgauss/univariate.hpp"

namespace tgauss::oracle {
namespace {

TEST(Integrate, BasicIntegrals) {
  const auto r = integrate([](double x) { return std::exp(log_phi(x)); }, {-kInf, kInf});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_GE(r.error_estimate, 0.0);
  const auto p = integrate([](double x) { return x * x; }, {1.0, 0.0, 0.5});
  EXPECT_NEAR(p.value, 1.0 / 3.0, 1e-14);
  // A sliver breakpoint must not blow up the evaluation count.
  const auto s = integrate([](double x) { return std::exp(-x); }, {0.0, 1e-12, 1.0});
  EXPECT_NEAR(s.value, 1.0 - std::exp(-1.0), 1e-13);
  EXPECT_LT(s.evaluations, 10000u);
}

TEST(ExactCdf, Examples) {
  EXPECT_EQ(exact_cdf_tn(-1.0, 2.0, -1.0), 0.0);
  EXPECT_EQ(exact_cdf_tn(-1.0, 2.0, 2.0), 1.0);
  EXPECT_NEAR(exact_cdf_tn(0.0, kInf, 0.6744897501960817), 0.5, 1e-12);
  // Far tail, reference from 40-digit arithmetic.
  const double mid = exact_cdf_tn(10.0, 11.0, 10.5);
  EXPECT_TRUE(std::isfinite(mid));
  EXPECT_NEAR(mid, 0.99435683663441904574, 1e-12);
  EXPECT_NEAR(exact_cdf_tn(-kInf, -30.0, -30.01), 1.0 - exact_cdf_tn(30.0, kInf, 30.01), 1e-12);
  EXPECT_THROW(exact_cdf_tn(0.0, 1.0, 1.5), std::domain_error);
  EXPECT_THROW(exact_cdf_tn(5.0, 5.0, 5.0), std::underflow_error);
}

TEST(Marginal, Reductions) {
  // rho = 0: phi(x1) times a constant.
  for (double x : {-2.0, 0.0, 1.3})
    EXPECT_NEAR(marginal_unnorm(0.0, -0.5, 1.0, x), std::exp(log_phi(x)) * (Phi(1.0) - Phi(-0.5)), 1e-15);
  // Symmetric window: maximum at 0.
  const double top = marginal_unnorm(0.6, -1.0, 1.0, 0.0);
  for (double x = -3.0; x <= 3.0; x += 0.01) EXPECT_LE(marginal_unnorm(0.6, -1.0, 1.0, x), top + 1e-15);
  // Against quadrature of the joint density over x2.
  for (double rho : {-0.9, -0.3, 0.4, 0.95}) {
    const double nu = std::sqrt(1.0 - rho * rho);
    for (double x = -2.0; x <= 2.0; x += 0.25) {
      const double joint =
          integrate(
              [&](double y) {
                return std::exp(log_phi(x) + log_phi((y - rho * x) / nu)) / nu;
              },
              {-0.7, 1.6})
              .value;
      EXPECT_NEAR(marginal_unnorm(rho, -0.7, 1.6, x), joint, 1e-8 * joint + 1e-300) << rho << " " << x;
    }
  }
}

TEST(RectProbability, OrthantAndSymmetry) {
  for (double rho : {-0.9, -0.5, 0.0, 0.3, 0.5, 0.99}) {
    const double orthant = 0.25 + std::asin(rho) / (2.0 * std::numbers::pi);
    EXPECT_NEAR(rect_probability(rho, 0.0, kInf, 0.0, kInf), orthant, 1e-10) << rho;
  }
  EXPECT_NEAR(rect_probability(0.5, 0.0, kInf, 0.0, kInf), 1.0 / 3.0, 1e-10);
  EXPECT_NEAR(rect_probability(0.0, -1.0, 0.5, 0.2, 2.0), (Phi(0.5) - Phi(-1.0)) * (Phi(2.0) - Phi(0.2)), 1e-12);
  EXPECT_NEAR(rect_probability(0.7, -1.0, 0.5, 0.2, 2.0), rect_probability(0.7, 0.2, 2.0, -1.0, 0.5), 1e-12);
  EXPECT_NEAR(rect_probability(-0.4, -1.0, 0.5, 0.2, 2.0), rect_probability(-0.4, -0.5, 1.0, -2.0, -0.2), 1e-12);
}

TEST(GridAndQuantiles, EqualProbabilityEdges) {
  const auto q = quantiles([](double x) { return exact_cdf_tn(0.0, kInf, x); }, 0.0, kInf, {0.25, 0.5, 0.75});
  EXPECT_NEAR(q[1], 0.6744897501960817, 1e-9);
  EXPECT_NEAR(q[0], 0.31863936396437514, 1e-9);
  const double rho = 0.6, a1 = -1.0, b1 = 2.0, a2 = 0.0, b2 = 3.0;
  const auto e1 = marginal_edges(rho, a1, b1, a2, b2, 0, 10);
  const auto e2 = marginal_edges(rho, a1, b1, a2, b2, 1, 8);
  ASSERT_EQ(e1.size(), 11u);
  ASSERT_EQ(e2.size(), 9u);
  EXPECT_EQ(e1.front(), a1);
  EXPECT_EQ(e1.back(), b1);
  const auto g = grid_probabilities(rho, e1, e2);
  ASSERT_EQ(g.size(), 80u);
  double total = 0.0;
  for (int i = 0; i < 10; ++i) {
    double row = 0.0;
    for (int j = 0; j < 8; ++j) row += g[i * 8 + j];
    EXPECT_NEAR(row, 0.1, 1e-8);
    total += row;
  }
  for (int j = 0; j < 8; ++j) {
    double col = 0.0;
    for (int i = 0; i < 10; ++i) col += g[i * 8 + j];
    EXPECT_NEAR(col, 0.125, 1e-8);
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(AcceptanceQuadrature, ClosedForms) {
  // rho -> 0 at a1 = a2 = 0: P(X2 >= 0 | X1 >= 0) = 1/2.
  const auto s0 = semifinite_acceptance(1e-9, 0.0, 0.0);
  EXPECT_EQ(s0.label, "S+");
  EXPECT_NEAR(s0.rate, 0.5, 1e-8);
  EXPECT_TRUE(s0.converged);
  EXPECT_EQ(semifinite_acceptance(0.0, 0.0, 0.0).label, "independent");
  for (double rho : {0.2, 0.5, 0.9}) {
    const auto s = semifinite_acceptance(rho, 0.0, 0.0);
    EXPECT_NEAR(s.rate, 0.5 + std::asin(rho) / std::numbers::pi, 1e-8) << rho;
  }
  EXPECT_NEAR(devroye_rate(1.0), 0.65567954241879847154, 1e-12);
  EXPECT_NEAR(devroye_rate(2.0), 0.84273845857610894645, 1e-12);
}

TEST(AcceptanceQuadrature, SMinusFloorQuadrature) {
  const auto b = sminus_floor_quadrature();
  EXPECT_TRUE(b.converged);
  EXPECT_NEAR(b.value, 0.416, 0.005);
  EXPECT_NEAR(b.value, 0.41579500090963780945, 1e-9);
}

TEST(AcceptanceQuadrature, MPlusRegimeSpotGrid) {
  double worst = 1.0;
  int points = 0;
  for (double rho = 0.05; rho < 1.0; rho += 0.1) {
    const double nu = std::sqrt(1.0 - rho * rho);
    // The regime needs a1 > 3.117 sqrt((1 + rho) / (1 - rho)) once a1 >= a2.
    for (double a1 = 0.0; a1 <= 10.0; a1 += 0.5) {
      for (double a2 = a1 - 4.0; a2 <= a1; a2 += 0.25) {
        if ((a2 - rho * a1) / nu <= 3.117) continue;
        const auto r = semifinite_acceptance(rho, a1, a2);
        ASSERT_EQ(r.label, "M+");
        ASSERT_TRUE(r.converged);
        worst = std::min(worst, r.rate);
        ++points;
      }
    }
  }
  ASSERT_GT(points, 10);
  EXPECT_GE(worst, 0.22);
}

TEST(BruteForce, AcceptanceFrequencies) {
  RandomStream s(91);
  Eigen::MatrixXd S2(2, 2);
  S2 << 1.0, 0.5, 0.5, 1.0;
  const auto r2 = brute_force_box_sampler(S2, Eigen::Vector2d(0, 0), Eigen::Vector2d(kInf, kInf), 100000, s);
  const double f2 = 100000.0 / double(r2.proposals);
  const double p2 = rect_probability(0.5, 0.0, kInf, 0.0, kInf);
  EXPECT_NEAR(f2, p2, 3.0 * std::sqrt(p2 * (1.0 - p2) / double(r2.proposals)) * (f2 / p2) + 1e-12);
  const Eigen::Vector3d a(0.2, -0.5, 1.0);
  const auto r3 =
      brute_force_box_sampler(Eigen::Matrix3d::Identity(), a, Eigen::Vector3d::Constant(kInf), 100000, s);
  const double p3 = Phi(-0.2) * Phi(0.5) * Phi(-1.0);
  const double f3 = 100000.0 / double(r3.proposals);
  EXPECT_NEAR(f3, p3, 3.0 * std::sqrt(p3 * (1.0 - p3) / double(r3.proposals)) * (f3 / p3));
  for (Eigen::Index k = 0; k < r3.draws.rows(); ++k)
    for (int i = 0; i < 3; ++i) ASSERT_GE(r3.draws(k, i), a(i));
  // d = 1 agrees with the exact truncated law.
  const auto r1 =
      brute_force_box_sampler(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Constant(1, 0.5),
                              Eigen::VectorXd::Constant(1, 1.5), 100000, s);
  std::vector<double> x(r1.draws.data(), r1.draws.data() + r1.draws.size());
  EXPECT_TRUE(ks_test(x, [](double v) { return exact_cdf_tn(0.5, 1.5, v); }).pass());
  EXPECT_THROW(brute_force_box_sampler(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Constant(2.5),
                                       Eigen::Vector3d::Constant(kInf), 10, s),
               std::domain_error);
}

TEST(BruteForce, Moments) {
  RandomStream s(92);
  Eigen::MatrixXd draws(200000, 2);
  for (Eigen::Index k = 0; k < draws.rows(); ++k) draws.row(k) << s.normal(), 2.0 + 3.0 * s.normal();
  const auto m = moments(draws);
  EXPECT_NEAR(m.mean(0), 0.0, 3.0 * m.mean_se(0));
  EXPECT_NEAR(m.mean(1), 2.0, 3.0 * m.mean_se(1));
  EXPECT_NEAR(m.mean_se(1), 3.0 / std::sqrt(200000.0), 1e-4);
  EXPECT_NEAR(m.cov(1, 1), 9.0, 3.0 * m.cov_se(1, 1));
  EXPECT_NEAR(m.cov(0, 1), 0.0, 3.0 * m.cov_se(0, 1));
  // Var of the sample variance of N(0, 9) is 2 * 81 / n.
  EXPECT_NEAR(m.cov_se(1, 1), std::sqrt(162.0 / 200000.0), 2e-3);
}

TEST(GoodnessOfFit, KsCalibrationAndPower) {
  RandomStream s(93);
  int pass = 0;
  for (int r = 0; r < 100; ++r) {
    std::vector<double> x(10000);
    for (double& v : x) v = s.normal();
    pass += ks_test(x, [](double v) { return Phi(v); }).pass();
  }
  EXPECT_GE(pass, 99);
  std::vector<double> shifted(10000), other(10000);
  for (double& v : shifted) v = s.normal() + 0.05;
  EXPECT_FALSE(ks_test(shifted, [](double v) { return Phi(v); }).pass());
  for (double& v : other) v = s.normal();
  EXPECT_FALSE(ks_two_sample(shifted, other).pass());
  for (double& v : shifted) v = s.normal();
  EXPECT_TRUE(ks_two_sample(shifted, other).pass());
  EXPECT_NEAR(ks_test(other, [](double v) { return Phi(v); }).critical, 1.63 / 100.0, 1e-15);
}

TEST(GoodnessOfFit, ChiSquareCalibrationAndMerging) {
  RandomStream s(94);
  std::vector<double> pvals;
  const std::vector<double> probs(20, 0.05);
  for (int r = 0; r < 300; ++r) {
    std::vector<std::uint64_t> counts(20, 0);
    for (int k = 0; k < 2000; ++k) ++counts[static_cast<int>(s.uniform() * 20.0)];
    const auto c = chi2_test(counts, probs);
    EXPECT_EQ(c.dof, 19);
    pvals.push_back(c.p_value);
  }
  EXPECT_TRUE(ks_test(pvals, [](double p) { return std::clamp(p, 0.0, 1.0); }).pass());
  // Tiny expected counts are merged into their neighbours.
  const std::vector<double> skew = {0.0005, 0.0005, 0.499, 0.499, 0.0005, 0.0005};
  const auto m = chi2_test({1, 0, 500, 497, 2, 0}, skew);
  EXPECT_LT(m.merged_cells, 6);
  EXPECT_GT(m.p_value, 0.01);
  const auto bad = chi2_test({0, 0, 900, 100, 0, 0}, skew);
  EXPECT_LT(bad.p_value, 1e-10);
}

}  // namespace
}  // namespace tgauss::oracle
