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

// Shared fixtures for the sampler tests.

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "tgauss/oracle.hpp"
#include "tgauss/tables.hpp"

namespace tgauss::testing {

inline const RegionTable& default_table() {
  static const RegionTable t = build_table_for_stored(kDefaultStoredTarget);
  return t;
}

/// Chi-square p-value of n bivariate draws on a 20 x 20 grid of oracle
/// marginal quantiles of the box.
inline double chi2_grid_pvalue(double rho, double a1, double b1, double a2, double b2, int n,
                               const std::function<std::pair<double, double>()>& draw) {
  return oracle::chi2_grid(rho, a1, b1, a2, b2, n, draw).p_value;
}

}  // namespace tgauss::testing
