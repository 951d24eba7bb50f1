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

// d-dimensional normal N(0, Sigma) truncated to {x_i >= a_i}, sampled by
// chaining one-dimensional conditional steps onto the bivariate sampler.
// Two chains exist; each applies only under sign conditions on precision
// matrices that are checked up front.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tgauss/bivariate_semifinite.hpp"
#include "tgauss/rng.hpp"
#include "tgauss/tables.hpp"

namespace tgauss {

enum class Chain : std::uint8_t { SPlus, SMinus };

struct MultivariateProblem {
  int d = 0;
  Eigen::MatrixXd Sigma;  // sorted so that a is descending
  Eigen::MatrixXd Q;      // Sigma^{-1}
  Eigen::VectorXd a;      // descending
  std::vector<int> perm;  // sorted index k holds original coordinate perm[k]
};

/// Validates (symmetric, unit diagonal, positive definite, d >= 3) and sorts.
/// Throws std::invalid_argument on violation.
MultivariateProblem make_multivariate(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& a);

/// S+ chain condition at stage k (1-based, 3 <= k <= d) on sorted inputs:
/// with P the inverse of the leading k x k block of Sigma, P_ik <= 0 for
/// i < k and sum_{i<k} P_ik a_i + P_kk a_k <= 0.
bool check_chain_splus(const MultivariateProblem& p, int k);

/// S- chain condition at stage k. Stage d uses Q = Sigma^{-1} and a; each
/// lower stage uses the leading block of the previous stage's precision and
/// truncation points shifted by that stage's proposal mean. Condition:
/// P_ik >= 0 for i < k and sum_{i<k} P_ik b_i + P_kk b_k >= 0.
bool check_chain_sminus(const MultivariateProblem& p, int k);

struct NotApplicable {
  int splus_failed_k = 0;   // first stage (1-based) violating the S+ chain
  int sminus_failed_k = 0;  // first stage (from d downwards) violating the S- chain
  std::string message() const;
};

struct MultivariateStats {
  std::uint64_t head_proposals = 0;  // bivariate proposals, the innermost unit of work
  std::uint64_t accepted = 0;
  double acceptance() const { return head_proposals ? double(accepted) / double(head_proposals) : 0.0; }
};

class MultivariateSampler {
 public:
  MultivariateSampler(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& a, const RegionTable& table,
                      SamplerConfig cfg = {});
  ~MultivariateSampler();
  MultivariateSampler(MultivariateSampler&&) noexcept;

  const MultivariateProblem& problem() const { return p_; }
  bool applicable() const { return chain_.has_value(); }
  /// Active chain; S+ is preferred when both apply.
  std::optional<Chain> chain() const { return chain_; }
  const NotApplicable& failure() const { return failure_; }

  /// Draw in original coordinate order, or the reason no chain applies.
  std::variant<Eigen::VectorXd, NotApplicable> try_sample(RandomStream& s, MultivariateStats* stats = nullptr);

  /// Forces a chain; throws std::logic_error if its conditions fail.
  Eigen::VectorXd sample_chain(Chain chain, RandomStream& s, MultivariateStats* stats = nullptr);

 private:
  struct Stage;
  Eigen::VectorXd sample_splus(RandomStream& s, MultivariateStats* stats);
  Eigen::VectorXd sample_sminus(RandomStream& s, MultivariateStats* stats);
  Eigen::VectorXd sminus_level(int k, RandomStream& s, MultivariateStats* stats);
  Eigen::VectorXd unsort(const Eigen::VectorXd& y) const;

  MultivariateProblem p_;
  const RegionTable* table_;
  SamplerConfig cfg_;
  std::optional<Chain> chain_;
  NotApplicable failure_;
  std::vector<Stage> splus_;   // stages 3..d
  std::vector<Stage> sminus_;  // stages 3..d
  std::unique_ptr<SemiFiniteSampler> splus_head_, sminus_head_;
  double sminus_sd_[2] = {1.0, 1.0};
};

}  // namespace tgauss
