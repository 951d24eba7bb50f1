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

#include "tgauss/phi_bounds.hpp"

#include <cmath>

#include "tgauss/normal.hpp"

namespace tgauss {
namespace {

// Bounds are computed in floating point; demand this much relative room
// before trusting them.
constexpr double kMargin = 1e-12;
constexpr double kTailStart = 2.0;

bool in_window(double z, const PhiBoundsContext& ctx) { return z >= ctx.a_min && z <= ctx.a_max; }

LazyCompareOutcome decided(bool above, DecidedBy by) {
  return {above ? Verdict::AboveThreshold : Verdict::BelowThreshold, by == DecidedBy::Exact, by};
}

// Bracket of Phi(-|z|) from the alternating tail series; each step tests the
// newest partial sum when early exit is on. Returns 1 for Above, 0 for Below,
// -1 if undecided. `flip` compares 1 - Phi(-|z|) instead.
int tail_decide(double z, double t, bool flip, bool early_exit) {
  const double s = std::abs(z);
  const double z2 = s * s;
  const double base = phi(s) / s;
  const double terms[4] = {1.0, -1.0 / z2, 3.0 / (z2 * z2), -15.0 / (z2 * z2 * z2)};
  double partial = 0.0;
  for (int k = 0; k < 4; ++k) {
    partial += terms[k];
    const bool is_upper = (k % 2 == 0);
    if (!early_exit && k < 2) continue;
    const double bound = base * partial;
    if (!flip) {
      if (is_upper && t > bound * (1.0 + kMargin)) return 0;
      if (!is_upper && t <= bound * (1.0 - kMargin)) return 1;
    } else {
      // Phi(|z|) = 1 - Phi(-|z|); an upper bound on Phi(-|z|) gives a lower
      // bound on Phi(|z|) and vice versa.
      const double other = 1.0 - bound;
      if (is_upper && t <= other * (1.0 - kMargin)) return 1;
      if (!is_upper && t > other * (1.0 + kMargin) + kMargin) return 0;
    }
  }
  return -1;
}

}  // namespace

double Phi_upper_table(double z, const PhiBoundsContext& ctx) {
  const RegionTable& t = *ctx.table;
  const int i = t.index_lookup(z);
  return t.cumulative_area(i + 1);
}

double Phi_lower_table(double z, const PhiBoundsContext& ctx) { return 1.0 - Phi_upper_table(-z, ctx); }

LazyCompareOutcome lazy_phi_at_least(double z, double t, const PhiBoundsContext& ctx) {
  if (t <= 0.0) return decided(true, DecidedBy::Table);
  if (in_window(z, ctx) && t > Phi_upper_table(z, ctx) * (1.0 + kMargin)) return decided(false, DecidedBy::Table);
  if (in_window(-z, ctx) && t <= Phi_lower_table(z, ctx) * (1.0 - kMargin) - kMargin)
    return decided(true, DecidedBy::Table);
  if (std::abs(z) >= kTailStart) {
    const int r = tail_decide(z, t, z > 0.0, ctx.tail_early_exit);
    if (r >= 0) return decided(r == 1, DecidedBy::Tail);
  }
  return decided(Phi(z) >= t, DecidedBy::Exact);
}

}  // namespace tgauss
