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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "tgauss/normal.hpp"

namespace tgauss::oracle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -kInf;
constexpr unsigned kMaxDepth = 15;

double nu_of(double rho) { return std::sqrt((1.0 - rho) * (1.0 + rho)); }

// Integrates exp(log_f(x) - shift) over the breakpoints.
QuadratureResult integrate_log(const std::function<double(double)>& log_f, double shift, std::vector<double> points) {
  return integrate([&](double x) { return std::exp(log_f(x) - shift); }, std::move(points));
}

// Keeps the candidates strictly inside (lo, hi) and adds the ends.
std::vector<double> breakpoints(double lo, double hi, std::initializer_list<double> inner) {
  std::vector<double> pts{lo, hi};
  for (double x : inner)
    if (std::isfinite(x) && x > lo && x < hi) pts.push_back(x);
  return pts;
}

AcceptanceOracle ratio(std::string label, QuadratureResult t, QuadratureResult e) {
  AcceptanceOracle r;
  r.label = std::move(label);
  r.z_target = t;
  r.z_envelope = e;
  r.rate = t.value / e.value;
  r.rate_error = r.rate * (t.error_estimate / std::abs(t.value) + e.error_estimate / std::abs(e.value));
  r.converged = t.converged && e.converged && std::isfinite(r.rate);
  return r;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, std::vector<double> points, double rel_tol) {
  std::sort(points.begin(), points.end());
  // Slivers defeat the Gauss-Kronrod error estimate; merge near-duplicates
  // into their neighbours, keeping both ends.
  std::vector<double> kept{points.front()};
  for (std::size_t k = 1; k < points.size(); ++k) {
    const double x = points[k];
    if (std::isfinite(x) && std::isfinite(kept.back()) && x - kept.back() <= 1e-8 * (1.0 + std::abs(x))) {
      if (k + 1 < points.size()) continue;
      if (kept.size() > 1) {
        kept.back() = x;
        continue;
      }
    }
    if (x != kept.back()) kept.push_back(x);
  }
  points.swap(kept);
  QuadratureResult out;
  double l1 = 0.0;
  auto counted = [&](double x) {
    ++out.evaluations;
    return f(x);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    double err = 0.0, piece_l1 = 0.0;
    const double lo = points[k], hi = points[k + 1];
    if (std::isfinite(lo) && std::isfinite(hi)) {
      // Boost's recursive error estimate is not rescaled by the subinterval
      // width, so narrow pieces are mapped onto [0, 1] first.
      const double w = hi - lo;
      auto unit = [&](double t) { return w * counted(lo + w * t); };
      out.value += GK::integrate(unit, 0.0, 1.0, kMaxDepth, rel_tol, &err, &piece_l1);
    } else {
      out.value += GK::integrate(counted, lo, hi, kMaxDepth, rel_tol, &err, &piece_l1);
    }
    out.error_estimate += err;
    l1 += piece_l1;
  }
  out.converged = std::isfinite(out.value) && out.error_estimate <= std::max(rel_tol * l1, 1e-300);
  return out;
}

double exact_cdf_tn(double a, double b, double x) {
  if (!(a <= x && x <= b)) throw std::domain_error("exact_cdf_tn: x outside [a, b]");
  const double mass = log_Phi_diff(a, b);
  if (!std::isfinite(mass)) throw std::underflow_error("exact_cdf_tn: interval mass underflows");
  if (x == a) return 0.0;
  if (x == b) return 1.0;
  const double left = std::exp(log_Phi_diff(a, x) - mass);
  if (left <= 0.5) return left;
  return 1.0 - std::exp(log_Phi_diff(x, b) - mass);
}

double marginal_unnorm(double rho, double a2, double b2, double x1) {
  const double nu = nu_of(rho);
  return phi(x1) * Phi_diff((a2 - rho * x1) / nu, (b2 - rho * x1) / nu);
}

double rect_probability(double rho, double lo1, double hi1, double lo2, double hi2) {
  if (!(lo1 < hi1 && lo2 < hi2)) return 0.0;
  const double nu = nu_of(rho);
  auto f = [&](double x) {
    if (!std::isfinite(x)) return 0.0;
    return phi(x) * Phi_diff((lo2 - rho * x) / nu, (hi2 - rho * x) / nu);
  };
  const double r = rho == 0.0 ? 1.0 : rho;
  return integrate(f, breakpoints(lo1, hi1, {0.0, lo2 / r, hi2 / r, -1.0, 1.0})).value;
}

std::vector<double> grid_probabilities(double rho, const std::vector<double>& edges1,
                                       const std::vector<double>& edges2) {
  std::vector<double> p;
  p.reserve((edges1.size() - 1) * (edges2.size() - 1));
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges1.size(); ++i)
    for (std::size_t j = 0; j + 1 < edges2.size(); ++j) {
      p.push_back(rect_probability(rho, edges1[i], edges1[i + 1], edges2[j], edges2[j + 1]));
      total += p.back();
    }
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> quantiles(const std::function<double(double)>& cdf, double lo, double hi,
                              const std::vector<double>& probs) {
  std::vector<double> out;
  for (double q : probs) {
    double l = lo, h = hi;
    if (!std::isfinite(l)) {
      l = std::isfinite(h) ? h - 1.0 : -1.0;
      for (double step = 1.0; cdf(l) > q; step *= 2.0) l -= step;
    }
    if (!std::isfinite(h)) {
      h = l + 1.0;
      for (double step = 1.0; cdf(h) < q; step *= 2.0) h += step;
    }
    for (int it = 0; it < 200 && h - l > 1e-12 * (1.0 + std::abs(l)); ++it) {
      const double m = 0.5 * (l + h);
      (cdf(m) < q ? l : h) = m;
    }
    out.push_back(0.5 * (l + h));
  }
  return out;
}

std::vector<double> marginal_edges(double rho, double a1, double b1, double a2, double b2, int k, int n) {
  if (k == 1) std::swap(a1, a2), std::swap(b1, b2);
  const double z = rect_probability(rho, a1, b1, a2, b2);
  auto cdf = [&](double x) { return rect_probability(rho, a1, x, a2, b2) / z; };
  std::vector<double> probs;
  for (int i = 1; i < n; ++i) probs.push_back(double(i) / n);
  std::vector<double> edges{a1};
  for (double q : quantiles(cdf, a1, b1, probs)) edges.push_back(q);
  edges.push_back(b1);
  return edges;
}

AcceptanceOracle semifinite_acceptance(double rho, double a1, double a2) {
  if (a1 < a2) std::swap(a1, a2);
  const double nu = nu_of(rho);
  auto w_of = [&](double x) { return (rho * x - a2) / nu; };
  auto log_target = [&](double x) { return log_phi(x) + log_Phi(w_of(x)); };
  // The target can sit hundreds of nats below phi(a1) when rho is near -1.
  double shift = kNegInf;
  for (double x : {a1, std::max(a1, 0.0), a1 + 1e-3, a1 + 1e-2, a1 + 0.1, a1 + 1.0, std::max(a1, rho * a2)})
    shift = std::max(shift, log_target(x));
  if (rho == 0.0) {
    const double z = Phi(-a1) * Phi(-a2);
    return ratio("independent", {z, 0.0, 0, true}, {z, 0.0, 0, true});
  }
  const double w0 = w_of(a1);
  std::string label;
  if (rho >= 0.0)
    label = w0 >= 0.0 ? "S+" : "M+";
  else if (a1 <= Phi_inv(1.0 / 3.0))
    label = "S+";
  else
    label = w0 <= 0.0 ? "S-" : "M-";
  const double split = a2 / rho;
  const double theta = rho * (a2 + kTilt * nu);
  std::function<double(double)> log_env;
  if (label == "S+") {
    log_env = [&](double x) { return log_phi(x); };
  } else if (label == "S-") {
    const double c = std::log(c_fun(w0));
    log_env = [&, c](double x) { return c + log_phi(x) + log_phi(w_of(x)); };
  } else if (label == "M-") {
    const double c = std::log(std::sqrt(std::numbers::pi / 2.0));
    log_env = [&, c](double x) { return x <= split ? log_phi(x) : c + log_phi(x) + log_phi(w_of(x)); };
  } else {
    const double c = std::log(d_fun(w0));
    log_env = [&, c](double x) {
      const double w = w_of(x);
      return x >= split ? log_phi(x) : c + log_phi(x) + log_phi(w) + kTilt * w;
    };
  }
  // Length over which Phi(w) or phi(w) changes by O(1) near a1; tiny when rho is near -1.
  const double ell = nu / (std::abs(rho) * (1.0 + std::abs(w0)));
  const auto pts = breakpoints(a1, kInf, {split, rho * a2, theta, a1 + 1.0, a1 + 4.0, 0.0, a1 + ell, a1 + 4.0 * ell,
                                          a1 + 16.0 * ell, a1 + 64.0 * ell});
  return ratio(label, integrate_log(log_target, shift, pts), integrate_log(log_env, shift, pts));
}

AcceptanceOracle finite_acceptance(const FiniteProblem& p, double delta, LeftWeightRule rule,
                                   const std::vector<double>& tangent_points) {
  const double rho = p.rho, nu = nu_of(rho);
  const double alpha = rho / nu, beta1 = -p.a2 / nu, beta0 = -p.b2 / nu;
  auto log_kappa_o = [&](double x) { return log_Phi_diff(alpha * x + beta0, alpha * x + beta1); };
  auto log_target = [&](double x) { return log_phi(x) + log_kappa_o(x); };
  double shift = kNegInf;
  for (double x : {p.a1, p.b1, 0.5 * (p.a1 + p.b1), std::clamp(0.0, p.a1, p.b1)}) shift = std::max(shift, log_target(x));
  if (rho == 0.0) {
    const double z = Phi_diff(p.a1, p.b1) * Phi_diff(p.a2, p.b2);
    return ratio("independent", {z, 0.0, 0, true}, {z, 0.0, 0, true});
  }
  const double gamma1 = p.a2 / rho, gamma0 = p.b2 / rho;
  const auto pts = breakpoints(p.a1, p.b1, {gamma1, gamma0, 0.0, rho * p.a2, rho * p.b2});
  const QuadratureResult zt = integrate_log(log_target, shift, pts);
  if (beta1 - beta0 >= delta) {
    const double log_sqrt_half_pi = 0.5 * std::log(std::numbers::pi / 2.0);
    const double left_hi = std::min(gamma1, p.b1);
    const double log_d = std::log(d_fun(std::min(0.0, alpha * p.a1 + beta1)));
    auto tilted = [&](double x) {
      const double w1 = alpha * x + beta1;
      return log_d + log_phi(x) + log_phi(w1) + kTilt * w1;
    };
    auto untilted = [&](double x) { return log_sqrt_half_pi + log_phi(x) + log_phi(alpha * x + beta1); };
    bool use_tilt = false;
    if (gamma1 > p.a1) {
      switch (rule) {
        case LeftWeightRule::Literal: use_tilt = std::max(p.b1, gamma1) > 0.0; break;
        case LeftWeightRule::ArgumentRange: use_tilt = alpha * left_hi + beta1 > -kChiDoubling; break;
        case LeftWeightRule::TighterWeight: {
          const auto lp = breakpoints(p.a1, left_hi, {0.0});
          use_tilt = integrate_log(tilted, shift, lp).value < integrate_log(untilted, shift, lp).value;
          break;
        }
      }
    }
    const double log_centre = log_Phi_diff(-0.5 * (beta1 - beta0), 0.5 * (beta1 - beta0));
    auto log_env = [&](double x) {
      if (x <= gamma1) return use_tilt ? tilted(x) : untilted(x);
      if (x <= gamma0) return log_phi(x) + log_centre;
      return log_sqrt_half_pi + log_phi(x) + log_phi(-(alpha * x + beta0));
    };
    return ratio("M3", zt, integrate_log(log_env, shift, pts));
  }
  if (tangent_points.empty() || tangent_points.size() > 2)
    throw std::invalid_argument("finite_acceptance: T case needs one or two tangent points");
  auto slope_at = [&](double x) {
    const double z1 = alpha * x + beta1, z0 = alpha * x + beta0;
    const double lk = log_kappa_o(x);
    return -x + alpha * (std::exp(log_phi(z1) - lk) - std::exp(log_phi(z0) - lk));
  };
  const double v = tangent_points.front(), w = tangent_points.back();
  const double tv = log_target(v), tw = log_target(w), sv = slope_at(v), sw = slope_at(w);
  double cross = p.b1;
  if (tangent_points.size() == 2) cross = std::clamp((tw - tv + sv * v - sw * w) / (sv - sw), v, w);
  auto log_env = [&](double x) { return x <= cross ? tv + sv * (x - v) : tw + sw * (x - w); };
  auto env_pts = pts;
  if (cross > p.a1 && cross < p.b1) env_pts.push_back(cross);
  return ratio("T", zt, integrate_log(log_env, shift, env_pts));
}

double devroye_rate(double a) {
  return std::sqrt(2.0 * std::numbers::pi) * a * std::exp(0.5 * a * a) * Phi(-a);
}

QuadratureResult sminus_floor_quadrature() {
  const double s = std::sqrt(2.0 / std::numbers::pi);
  QuadratureResult r = integrate([&](double z) { return 2.0 * phi(z) * psi(z + s); }, {0.0, 2.0, 6.0, kInf});
  r.value *= s;
  r.error_estimate *= s;
  return r;
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 2) throw std::invalid_argument("ks_test: need at least two samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  KsResult r;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    r.statistic = std::max({r.statistic, (double(i) + 1.0) / n - f, f - double(i) / n});
  }
  r.critical = 1.63 / std::sqrt(n);
  return r;
}

KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = double(x.size()), m = double(y.size());
  std::size_t i = 0, j = 0;
  KsResult r;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    r.statistic = std::max(r.statistic, std::abs(double(i) / n - double(j) / m));
  }
  r.critical = 1.63 * std::sqrt((n + m) / (n * m));
  return r;
}

Chi2Result chi2_test(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs) {
  if (counts.size() != probs.size() || counts.empty()) throw std::invalid_argument("chi2_test: size mismatch");
  double n = 0.0;
  for (auto c : counts) n += double(c);
  std::vector<std::pair<double, double>> groups;  // (observed, expected)
  double obs = 0.0, expd = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    obs += double(counts[k]);
    expd += n * probs[k];
    if (expd >= 5.0) {
      groups.emplace_back(obs, expd);
      obs = expd = 0.0;
    }
  }
  if (expd > 0.0 || obs > 0.0) {
    if (groups.empty()) {
      groups.emplace_back(obs, expd);
    } else {
      groups.back().first += obs;
      groups.back().second += expd;
    }
  }
  Chi2Result r;
  for (auto [o, e] : groups) r.statistic += (o - e) * (o - e) / e;
  r.merged_cells = static_cast<int>(groups.size());
  r.dof = r.merged_cells - 1;
  r.p_value = r.dof > 0 ? boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic) : 1.0;
  return r;
}

Chi2Result chi2_grid(double rho, double a1, double b1, double a2, double b2, int n,
                     const std::function<std::pair<double, double>()>& draw, int cells) {
  const auto e1 = marginal_edges(rho, a1, b1, a2, b2, 0, cells);
  const auto e2 = marginal_edges(rho, a1, b1, a2, b2, 1, cells);
  const auto probs = grid_probabilities(rho, e1, e2);
  std::vector<std::uint64_t> counts(probs.size(), 0);
  auto cell = [](const std::vector<double>& e, double x) {
    const auto it = std::upper_bound(e.begin() + 1, e.end() - 1, x);
    return static_cast<int>(it - (e.begin() + 1));
  };
  for (int k = 0; k < n; ++k) {
    const auto [x1, x2] = draw();
    ++counts[cell(e1, x1) * cells + cell(e2, x2)];
  }
  return chi2_test(counts, probs);
}

BruteForceResult brute_force_box_sampler(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& a,
                                         const Eigen::VectorXd& b, std::size_t n, RandomStream& s) {
  const auto d = Sigma.rows();
  if (Sigma.cols() != d || a.size() != d || b.size() != d)
    throw std::invalid_argument("brute_force_box_sampler: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("brute_force_box_sampler: Sigma not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::VectorXd z(d);
  auto draw = [&]() {
    for (Eigen::Index i = 0; i < d; ++i) z(i) = s.normal();
    Eigen::VectorXd x = L * z;
    return std::pair{x, ((x.array() >= a.array()) && (x.array() <= b.array())).all()};
  };
  constexpr int kPilot = 200000;
  int hits = 0;
  for (int k = 0; k < kPilot; ++k) hits += draw().second;
  if (double(hits) / kPilot < 1e-4) throw std::domain_error("brute_force_box_sampler: box probability below 1e-4");
  BruteForceResult r;
  r.draws.resize(static_cast<Eigen::Index>(n), d);
  for (std::size_t k = 0; k < n;) {
    auto [x, in] = draw();
    ++r.proposals;
    if (in) r.draws.row(static_cast<Eigen::Index>(k++)) = x.transpose();
  }
  return r;
}

MomentSummary moments(const Eigen::MatrixXd& draws) {
  const double n = double(draws.rows());
  const auto d = draws.cols();
  MomentSummary m;
  m.mean = draws.colwise().mean().transpose();
  const Eigen::MatrixXd c = draws.rowwise() - m.mean.transpose();
  m.cov = c.transpose() * c / (n - 1.0);
  m.mean_se = (m.cov.diagonal() / n).cwiseSqrt();
  m.cov_se.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Eigen::ArrayXd prod = c.col(i).array() * c.col(j).array();
      const double var = (prod - prod.mean()).square().sum() / (n - 1.0);
      m.cov_se(i, j) = std::sqrt(var / n);
    }
  return m;
}

}  // namespace tgauss::oracle
