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

// Bivariate standard normal with correlation rho, truncated to
// X1 >= a1, X2 >= a2. Four rejection schemes (S+, S-, M+, M-) selected by
// the sign of rho and of the conditional mean argument.

#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include "tgauss/phi_bounds.hpp"
#include "tgauss/rng.hpp"
#include "tgauss/tables.hpp"
#include "tgauss/univariate.hpp"

namespace tgauss {

enum class SemiCase : std::uint8_t { SPlus, SMinus, MPlus, MMinus };

std::string_view to_string(SemiCase c);

/// |rho| at or above this is rejected as degenerate.
inline constexpr double kMaxAbsRho = 1.0 - 1e-12;

/// Phi^{-1}(1/3), the S+/S- boundary for negative rho.
inline constexpr double kOneThirdQuantile = -0.43072729929545754;

struct SemiFiniteProblem {
  double rho = 0.0;
  double a1 = 0.0;  // canonical: a1 >= a2
  double a2 = 0.0;
  double nu2 = 1.0;
  double nu = 1.0;
  bool swapped = false;
};

/// Canonical problem with a1 >= a2. Throws std::invalid_argument when
/// |rho| >= 1 - 1e-12 or an input is not finite.
SemiFiniteProblem make_semifinite(double rho, double a1, double a2);

SemiCase classify(const SemiFiniteProblem& p);

/// Unnormalised mixture weights: (omega1, omega2) for M-, (tau1, tau2) for
/// M+; (1, 0) for the single-component cases.
struct MixtureWeights {
  double w1 = 1.0;
  double w2 = 0.0;
  double log_w1 = 0.0;
  double log_w2 = -kInf;
  double p1 = 1.0;     // w1 / (w1 + w2)
  double theta = 0.0;  // M+ component-2 location rho (a2 + lambda nu)
};

struct SemiProposal {
  bool accepted = false;
  double x1 = 0.0;  // canonical coordinates
  double x2 = 0.0;
  int component = 1;
  double accept_prob = -1.0;  // filled when requested
  bool used_exact = false;
};

class SemiFiniteSampler {
 public:
  SemiFiniteSampler(double rho, double a1, double a2, const RegionTable& table, SamplerConfig cfg = {},
                    bool tail_early_exit = true);

  const SemiFiniteProblem& problem() const { return p_; }
  SemiCase label() const { return case_; }
  /// rho == 0: two independent univariate draws, no rejection.
  bool independent() const { return independent_; }
  const MixtureWeights& weights() const { return weights_; }

  /// Unnormalised X1 marginal phi(x1) Phi((rho x1 - a2) / nu), canonical x1.
  double target(double x1) const;
  /// Unnormalised envelope of the active case, canonical x1 >= a1.
  double envelope(double x1) const;

  /// One proposal in canonical coordinates. When accepted, x2 is filled.
  SemiProposal propose(RandomStream& s, bool want_prob = false);

  /// Exact draw in the caller's original component order.
  std::pair<double, double> sample(RandomStream& s, std::uint64_t* proposals = nullptr);

  const LazyCompareCounters& lazy_counters() const { return lazy_; }

 private:
  bool accept_phi(double w, double u, double scale, bool tilt, SemiProposal& out);
  double draw_x2_tail(double x1, RandomStream& s);

  SemiFiniteProblem p_;
  SemiCase case_;
  bool independent_ = false;
  MixtureWeights weights_;
  const RegionTable* table_;
  SamplerConfig cfg_;
  PhiBoundsContext ctx_;
  double bound_ = 0.0;  // c(w0) for S-, d(w0) for M+, sqrt(pi/2) for M-
  double split_ = 0.0;  // a2 / rho for the mixture cases
  LazyCompareCounters lazy_;
};

}  // namespace tgauss
