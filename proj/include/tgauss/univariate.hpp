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

// Univariate truncated normal samplers: the region-table algorithm for [a, inf)
// and [a, b], and the classical baselines it is benchmarked against.

#pragma once

#include <cstdint>
#include <limits>

#include "tgauss/rng.hpp"
#include "tgauss/tables.hpp"

namespace tgauss {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SamplerConfig {
  double a0 = 0.65;  // Devroye cut-off used by the composite baselines
  int k_min = 5;     // at most this many regions in [a, b] -> exponential rejection
};

/// Optional branch instrumentation. Every sampler accepts a nullable pointer.
struct BranchCounters {
  std::uint64_t proposals = 0;       // candidate draws (region choices for the table sampler)
  std::uint64_t accepted = 0;
  std::uint64_t fast_path = 0;       // accepted without evaluating the density
  std::uint64_t density_checks = 0;  // proposals that evaluated phi
  std::uint64_t tail = 0;            // right-tail region draws
  std::uint64_t fallback = 0;        // calls routed away from the table

  BranchCounters& operator+=(const BranchCounters& o);
  double acceptance() const { return proposals ? double(accepted) / double(proposals) : 0.0; }
};

struct UnivariateSpec {
  double a = -kInf;
  double b = kInf;
  double mu = 0.0;
  double sigma = 1.0;
};

/// -Phi_inv(Phi(-a) u) for u in (0, 1]. Throws std::overflow_error when the
/// result is not finite.
double inverse_transform(double a, double u);

/// Exponential proposal with rate a, for a > 0.
double devroye(double a, RandomStream& s, BranchCounters* c = nullptr);

/// Exponential proposal with rate (a + sqrt(a^2 + 4)) / 2, for a >= 0.
double geweke_robert(double a, RandomStream& s, BranchCounters* c = nullptr);

/// Repeat X ~ N(0, 1) until a <= X <= b. Throws std::domain_error when
/// Phi(b) - Phi(a) < 1e-6.
double naive(double a, double b, RandomStream& s, BranchCounters* c = nullptr);

/// Density proportional to exp(-rate x) on [a, b], by inversion. Falls back
/// to a uniform when |rate (b - a)| < 1e-12.
double trunc_exp(double a, double b, double rate, RandomStream& s);

/// Baselines as deployed: naive below the cut-off a0 (Devroye) or below 0
/// (Geweke-Robert), the exponential proposal above.
double devroye_composite(double a, const SamplerConfig& cfg, RandomStream& s, BranchCounters* c = nullptr);
double geweke_robert_composite(double a, RandomStream& s, BranchCounters* c = nullptr);
double inverse_transform_sample(double a, RandomStream& s);

/// Region-table sampler for [a, inf).
double sample_lower(double a, const RegionTable& t, RandomStream& s, BranchCounters* c = nullptr);

/// Region-table sampler for [a, b], a < b, b possibly infinite.
double sample_interval(double a, double b, const RegionTable& t, const SamplerConfig& cfg, RandomStream& s,
                       BranchCounters* c = nullptr);

/// mu + sigma z with z drawn on the standardized interval. Either end may be
/// infinite. Throws std::invalid_argument unless a < b and sigma > 0.
double sample_general(const UnivariateSpec& spec, const RegionTable& t, const SamplerConfig& cfg, RandomStream& s,
                      BranchCounters* c = nullptr);

}  // namespace tgauss
