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

// Cheap brackets for Phi and the lazy threshold comparison used by the
// bivariate acceptance tests.

#pragma once

#include <cstdint>

#include "tgauss/tables.hpp"

namespace tgauss {

struct PhiBoundsContext {
  explicit PhiBoundsContext(const RegionTable& t, bool early_exit = true)
      : table(&t), a_min(t.a_min), a_max(t.a_max), h(t.h), tail_early_exit(early_exit) {}

  const RegionTable* table;
  double a_min;
  double a_max;
  double h;
  bool tail_early_exit;  // stop the tail series as soon as a partial sum decides
};

/// Upper bound A(j_{floor(z/h)} + 1) for Phi(z); requires z in [a_min, a_max].
double Phi_upper_table(double z, const PhiBoundsContext& ctx);

/// 1 - Phi_upper_table(-z); requires -z in [a_min, a_max].
double Phi_lower_table(double z, const PhiBoundsContext& ctx);

enum class Verdict : std::uint8_t { BelowThreshold, AboveThreshold };
enum class DecidedBy : std::uint8_t { Table, Tail, Exact };

struct LazyCompareOutcome {
  Verdict verdict;
  bool used_exact;
  DecidedBy decided_by;

  bool above() const { return verdict == Verdict::AboveThreshold; }
};

struct LazyCompareCounters {
  std::uint64_t table = 0;
  std::uint64_t tail = 0;
  std::uint64_t exact = 0;

  void record(DecidedBy d) {
    switch (d) {
      case DecidedBy::Table: ++table; break;
      case DecidedBy::Tail: ++tail; break;
      case DecidedBy::Exact: ++exact; break;
    }
  }
};

/// Decides Phi(z) >= t, consulting the table bracket, then the tail series
/// for |z| >= 2, and only then the exact Phi.
LazyCompareOutcome lazy_phi_at_least(double z, double t, const PhiBoundsContext& ctx);

}  // namespace tgauss
