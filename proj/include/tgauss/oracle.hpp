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

// Slow reference computations used to validate the samplers: exact CDFs,
// adaptive quadrature of targets and envelopes, brute-force rejection and
// goodness-of-fit statistics. Envelope formulas here are written out
// independently of the sampler sources.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tgauss/bivariate_finite.hpp"
#include "tgauss/rng.hpp"

namespace tgauss::oracle {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::uint64_t evaluations = 0;
  bool converged = true;  // relative error estimate within the requested tolerance
};

inline constexpr double kQuadratureTolerance = 1e-10;

/// Adaptive Gauss-Kronrod over consecutive breakpoints; the first and last
/// may be infinite. Points are sorted and deduplicated.
QuadratureResult integrate(const std::function<double(double)>& f, std::vector<double> points,
                           double rel_tol = kQuadratureTolerance);

/// (Phi(x) - Phi(a)) / (Phi(b) - Phi(a)) evaluated in the tail where it is
/// accurate. Throws std::domain_error outside [a, b] and
/// std::underflow_error when the interval mass underflows.
double exact_cdf_tn(double a, double b, double x);

/// Unnormalised X1 marginal phi(x1) (Phi((b2 - rho x1)/nu) - Phi((a2 - rho x1)/nu)).
double marginal_unnorm(double rho, double a2, double b2, double x1);

/// P(lo1 <= X1 <= hi1, lo2 <= X2 <= hi2) for the standard bivariate normal
/// with correlation rho, by one-dimensional quadrature.
double rect_probability(double rho, double lo1, double hi1, double lo2, double hi2);

/// Cell probabilities of the box [a1,b1] x [a2,b2] conditioned on itself, for
/// a grid given by edges (first/last edge equal the box bounds). Row-major in
/// x1 cells.
std::vector<double> grid_probabilities(double rho, const std::vector<double>& edges1,
                                       const std::vector<double>& edges2);

/// Quantiles q_k of a monotone CDF on [lo, hi] by bisection; hi may be infinite.
std::vector<double> quantiles(const std::function<double(double)>& cdf, double lo, double hi,
                              const std::vector<double>& probs);

/// Edges of n equal-probability cells of the k-th marginal (k = 0 or 1) of the
/// truncated bivariate normal on the box.
std::vector<double> marginal_edges(double rho, double a1, double b1, double a2, double b2, int k, int n);

struct AcceptanceOracle {
  std::string label;
  QuadratureResult z_target;
  QuadratureResult z_envelope;
  double rate = 0.0;
  double rate_error = 0.0;
  bool converged = true;
};

/// Acceptance rate Z_target / Z_envelope of the semi-finite scheme chosen for
/// (rho, a1, a2), from the case definitions.
AcceptanceOracle semifinite_acceptance(double rho, double a1, double a2);

/// Acceptance rate of the finite scheme on an oriented problem (rho >= 0). Tangent points
/// for the T case are taken as given (one or two); everything else is recomputed.
AcceptanceOracle finite_acceptance(const FiniteProblem& p, double delta, LeftWeightRule rule,
                                   const std::vector<double>& tangent_points);

/// Devroye exponential-proposal acceptance sqrt(2 pi) a exp(a^2/2) Phi(-a).
double devroye_rate(double a);

/// sqrt(2/pi) E[psi(Z + sqrt(2/pi))] for Z half-normal.
QuadratureResult sminus_floor_quadrature();

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;  // alpha = 0.01
  bool pass() const { return statistic < critical; }
};

/// One-sample Kolmogorov-Smirnov distance; samples need not be sorted.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

struct Chi2Result {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int merged_cells = 0;  // cells after merging those with expected count below 5
};

/// Pearson chi-square of counts against probabilities (summing to one).
/// Adjacent cells are merged until each expected count reaches 5.
Chi2Result chi2_test(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs);

/// Pearson chi-square of n bivariate draws against the exact cell
/// probabilities of a cells x cells grid of equal-probability marginal cells.
Chi2Result chi2_grid(double rho, double a1, double b1, double a2, double b2, int n,
                     const std::function<std::pair<double, double>()>& draw, int cells = 20);

struct BruteForceResult {
  Eigen::MatrixXd draws;  // n x d
  std::uint64_t proposals = 0;
};

/// Draws N(0, Sigma) until each lands in [a, b]. Refuses (std::domain_error)
/// when a pilot run estimates the box probability below 1e-4.
BruteForceResult brute_force_box_sampler(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& a,
                                         const Eigen::VectorXd& b, std::size_t n, RandomStream& s);

struct MomentSummary {
  Eigen::VectorXd mean, mean_se;
  Eigen::MatrixXd cov, cov_se;
};

/// Sample mean and covariance with standard errors from the fourth moments.
MomentSummary moments(const Eigen::MatrixXd& draws);

}  // namespace tgauss::oracle
