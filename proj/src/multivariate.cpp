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

#include "tgauss/multivariate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "tgauss/normal.hpp"
#include "tgauss/univariate.hpp"

namespace tgauss {

struct MultivariateSampler::Stage {
  Eigen::VectorXd q;   // P_ik, i < k
  double qkk = 1.0;
  double b_k = 0.0;    // truncation point of the new coordinate
  Eigen::VectorXd mu;  // S-: mean of the proposal for the leading coordinates
  double c0 = kSqrtHalfPi;
  bool ok = false;
};

namespace {

constexpr double kRelTol = 1e-12;

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("covariance is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

// Chain condition sign * (P_ik) >= 0 for i < k and sign * (sum P_ik b_i + P_kk b_k) >= 0.
bool chain_condition(const Eigen::VectorXd& q, double qkk, const Eigen::VectorXd& b_head, double b_k, double sign) {
  const double scale = 1.0 + q.cwiseAbs().maxCoeff() + std::abs(qkk);
  for (int i = 0; i < q.size(); ++i)
    if (sign * q(i) < -kRelTol * scale) return false;
  const double s = q.dot(b_head) + qkk * b_k;
  const double s_scale = 1.0 + (q.cwiseProduct(b_head)).cwiseAbs().sum() + std::abs(qkk * b_k);
  return sign * s >= -kRelTol * s_scale;
}


}  // namespace

MultivariateProblem make_multivariate(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& a) {
  const auto d = Sigma.rows();
  if (Sigma.cols() != d || a.size() != d) throw std::invalid_argument("Sigma must be d x d and a of length d");
  if (d < 3) throw std::invalid_argument("multivariate chains need d >= 3");
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!std::isfinite(a(i))) throw std::invalid_argument("truncation points must be finite");
    if (std::abs(Sigma(i, i) - 1.0) > 1e-12) throw std::invalid_argument("Sigma must have unit diagonal");
    for (Eigen::Index j = 0; j < i; ++j)
      if (!(std::abs(Sigma(i, j) - Sigma(j, i)) <= 1e-12)) throw std::invalid_argument("Sigma must be symmetric");
  }
  MultivariateProblem p;
  p.d = static_cast<int>(d);
  p.perm.resize(d);
  std::iota(p.perm.begin(), p.perm.end(), 0);
  std::stable_sort(p.perm.begin(), p.perm.end(), [&](int i, int j) { return a(i) > a(j); });
  p.Sigma.resize(d, d);
  p.a.resize(d);
  for (int i = 0; i < d; ++i) {
    p.a(i) = a(p.perm[i]);
    for (int j = 0; j < d; ++j) p.Sigma(i, j) = Sigma(p.perm[i], p.perm[j]);
  }
  p.Q = spd_inverse(p.Sigma);
  if ((p.Q * p.Sigma - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("Sigma is too ill-conditioned to invert to 1e-10");
  return p;
}

bool check_chain_splus(const MultivariateProblem& p, int k) {
  if (k < 3 || k > p.d) throw std::out_of_range("stage index out of range");
  const Eigen::MatrixXd P = spd_inverse(p.Sigma.topLeftCorner(k, k));
  return chain_condition(P.col(k - 1).head(k - 1), P(k - 1, k - 1), p.a.head(k - 1), p.a(k - 1), -1.0);
}

namespace {

// S- recursion from stage d down to 3; returns per-stage data, index k - 3.
struct SminusPlan {
  std::vector<Eigen::VectorXd> q, mu;
  std::vector<double> qkk, b_k, c0;
  std::vector<bool> ok;
  Eigen::MatrixXd head_precision;
  Eigen::Vector2d head_b;
};

SminusPlan plan_sminus(const MultivariateProblem& p) {
  SminusPlan plan;
  const int d = p.d;
  plan.q.resize(d - 2), plan.mu.resize(d - 2), plan.qkk.resize(d - 2), plan.b_k.resize(d - 2), plan.c0.resize(d - 2);
  plan.ok.resize(d - 2);
  Eigen::MatrixXd P = p.Q;
  Eigen::VectorXd b = p.a;
  for (int k = d; k >= 3; --k) {
    const int s = k - 3;
    const Eigen::VectorXd q = P.col(k - 1).head(k - 1);
    const double qkk = P(k - 1, k - 1);
    const Eigen::MatrixXd Q11 = P.topLeftCorner(k - 1, k - 1);
    const Eigen::VectorXd b_head = b.head(k - 1);
    plan.q[s] = q;
    plan.qkk[s] = qkk;
    plan.b_k[s] = b(k - 1);
    plan.ok[s] = chain_condition(q, qkk, b_head, b(k - 1), 1.0);
    plan.mu[s] = -b(k - 1) * Q11.llt().solve(q);
    const double z0 = -(q.dot(b_head) + qkk * b(k - 1)) / std::sqrt(qkk);
    plan.c0[s] = c_fun(std::min(z0, 0.0));
    P = Q11;
    b = b_head - plan.mu[s];
  }
  plan.head_precision = P;
  plan.head_b = b;
  return plan;
}

}  // namespace

bool check_chain_sminus(const MultivariateProblem& p, int k) {
  if (k < 3 || k > p.d) throw std::out_of_range("stage index out of range");
  return plan_sminus(p).ok[k - 3];
}

std::string NotApplicable::message() const {
  return fmt::format("no chain applies: S+ condition fails at stage {}, S- condition fails at stage {}",
                     splus_failed_k, sminus_failed_k);
}

MultivariateSampler::MultivariateSampler(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& a,
                                         const RegionTable& table, SamplerConfig cfg)
    : p_(make_multivariate(Sigma, a)), table_(&table), cfg_(cfg) {
  const int d = p_.d;
  bool splus_ok = true;
  for (int k = 3; k <= d; ++k) {
    const Eigen::MatrixXd P = spd_inverse(p_.Sigma.topLeftCorner(k, k));
    Stage st;
    st.q = P.col(k - 1).head(k - 1);
    st.qkk = P(k - 1, k - 1);
    st.b_k = p_.a(k - 1);
    st.ok = chain_condition(st.q, st.qkk, p_.a.head(k - 1), st.b_k, -1.0);
    if (!st.ok && splus_ok) {
      splus_ok = false;
      failure_.splus_failed_k = k;
    }
    splus_.push_back(std::move(st));
  }
  const SminusPlan plan = plan_sminus(p_);
  bool sminus_ok = true;
  for (int k = d; k >= 3; --k) {
    if (!plan.ok[k - 3] && sminus_ok) {
      sminus_ok = false;
      failure_.sminus_failed_k = k;
    }
  }
  sminus_.resize(d - 2);
  for (int s = 0; s < d - 2; ++s) {
    sminus_[s].q = plan.q[s];
    sminus_[s].qkk = plan.qkk[s];
    sminus_[s].b_k = plan.b_k[s];
    sminus_[s].mu = plan.mu[s];
    sminus_[s].c0 = plan.c0[s];
    sminus_[s].ok = plan.ok[s];
  }
  if (splus_ok) {
    chain_ = Chain::SPlus;
    splus_head_ = std::make_unique<SemiFiniteSampler>(p_.Sigma(0, 1), p_.a(0), p_.a(1), table, cfg);
  }
  if (sminus_ok) {
    if (!chain_) chain_ = Chain::SMinus;
    const Eigen::Matrix2d cov = plan.head_precision.inverse();
    sminus_sd_[0] = std::sqrt(cov(0, 0));
    sminus_sd_[1] = std::sqrt(cov(1, 1));
    const double r = cov(0, 1) / (sminus_sd_[0] * sminus_sd_[1]);
    sminus_head_ = std::make_unique<SemiFiniteSampler>(r, plan.head_b(0) / sminus_sd_[0],
                                                       plan.head_b(1) / sminus_sd_[1], table, cfg);
  }
}

MultivariateSampler::~MultivariateSampler() = default;
MultivariateSampler::MultivariateSampler(MultivariateSampler&&) noexcept = default;

Eigen::VectorXd MultivariateSampler::unsort(const Eigen::VectorXd& y) const {
  Eigen::VectorXd x(p_.d);
  for (int k = 0; k < p_.d; ++k) x(p_.perm[k]) = y(k);
  return x;
}

Eigen::VectorXd MultivariateSampler::sample_splus(RandomStream& s, MultivariateStats* stats) {
  const int d = p_.d;
  Eigen::VectorXd x(d);
  while (true) {
    std::uint64_t n = 0;
    const auto [x1, x2] = splus_head_->sample(s, &n);
    if (stats) stats->head_proposals += n;
    x(0) = x1, x(1) = x2;
    bool ok = true;
    for (int k = 3; k <= d && ok; ++k) {
      const Stage& st = splus_[k - 3];
      const double mean = -st.q.dot(x.head(k - 1)) / st.qkk;
      x(k - 1) = mean + s.normal() / std::sqrt(st.qkk);
      ok = x(k - 1) >= st.b_k;
    }
    if (ok) break;
  }
  if (stats) ++stats->accepted;
  return x;
}

Eigen::VectorXd MultivariateSampler::sminus_level(int k, RandomStream& s, MultivariateStats* stats) {
  if (k == 2) {
    std::uint64_t n = 0;
    const auto [u0, u1] = sminus_head_->sample(s, &n);
    if (stats) stats->head_proposals += n;
    return Eigen::Vector2d(sminus_sd_[0] * u0, sminus_sd_[1] * u1);
  }
  const Stage& st = sminus_[k - 3];
  const double root = std::sqrt(st.qkk);
  while (true) {
    const Eigen::VectorXd y = sminus_level(k - 1, s, stats) + st.mu;
    const double z = -(st.q.dot(y) + st.qkk * st.b_k) / root;
    if (s.uniform() * st.c0 <= psi(-z)) {
      Eigen::VectorXd out(k);
      out.head(k - 1) = y;
      out(k - 1) = sample_general({st.b_k, kInf, -st.q.dot(y) / st.qkk, 1.0 / root}, *table_, cfg_, s);
      return out;
    }
  }
}

Eigen::VectorXd MultivariateSampler::sample_sminus(RandomStream& s, MultivariateStats* stats) {
  Eigen::VectorXd x = sminus_level(p_.d, s, stats);
  if (stats) ++stats->accepted;
  return x;
}

Eigen::VectorXd MultivariateSampler::sample_chain(Chain chain, RandomStream& s, MultivariateStats* stats) {
  if (chain == Chain::SPlus) {
    if (!splus_head_) throw std::logic_error("S+ chain conditions do not hold for this problem");
    return unsort(sample_splus(s, stats));
  }
  if (!sminus_head_) throw std::logic_error("S- chain conditions do not hold for this problem");
  return unsort(sample_sminus(s, stats));
}

std::variant<Eigen::VectorXd, NotApplicable> MultivariateSampler::try_sample(RandomStream& s,
                                                                             MultivariateStats* stats) {
  if (!chain_) return failure_;
  return sample_chain(*chain_, s, stats);
}

}  // namespace tgauss
