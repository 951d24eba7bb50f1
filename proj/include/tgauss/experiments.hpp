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
// Desk-scale experiments: parameter laws, acceptance-rate histograms, the
// univariate timing benchmark and the acceptance-criteria checks shared by
// the command-line tool and the acceptance binary.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tgauss/rng.hpp"
#include "tgauss/tables.hpp"
#include "tgauss/univariate.hpp"

namespace tgauss::experiments {

/// Project version and source revision stamped at configure time.
std::string version_stamp();

/// 64-bit FNV-1a of the serialized table; identifies a table in manifests.
std::uint64_t table_fingerprint(const RegionTable& table);

struct SemiParams {
  double rho = 0.0, a1 = 0.0, a2 = 0.0;
};

struct BoxParams {
  double rho = 0.0, a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
};

/// rho ~ U[-1, 1], a1, a2 ~ N(0, s^2), ordered so that a1 >= a2.
SemiParams draw_semifinite_law(RandomStream& s, double scale = 1.0);

/// rho ~ U[-1, 1], a_i ~ N(0, 2^2), b_i = a_i + 2 E_i with E_i ~ Exp(1).
BoxParams draw_box_law(RandomStream& s);

enum class Experiment { Fig3, Fig4 };

std::string_view to_string(Experiment e);

struct HistogramRow {
  std::uint64_t index = 0;
  BoxParams params;  // b1 = b2 = inf for the semi-finite experiment
  std::string label;
  double rate = 0.0;           // mean acceptance probability over the proposals
  std::uint64_t accepted = 0;  // accepted proposals
};

struct HistogramSummary {
  std::size_t problems = 0;
  int proposals = 0;
  double min = 0.0, q01 = 0.0, q10 = 0.0, median = 0.0;
  double sigma_hat = 0.0;  // binomial standard error of one rate at 1/2
};

struct HistogramResult {
  Experiment experiment = Experiment::Fig3;
  std::vector<HistogramRow> rows;
  HistogramSummary summary;

  /// Fraction of problems with rate >= threshold.
  double fraction_at_least(double threshold) const;
};

/// n_problems problems from the experiment's law, n_props proposals each.
/// Problem k uses the stream derive_seed(seed, k).
HistogramResult run_histogram(Experiment e, int n_problems, int n_props, std::uint64_t seed, const RegionTable& table);

enum class BenchAlgorithm { Table, Devroye, GewekeRobert, Inverse };

std::string_view to_string(BenchAlgorithm a);
/// Throws std::invalid_argument for an unknown name.
BenchAlgorithm parse_bench_algorithm(std::string_view name);

struct BenchRow {
  std::string algorithm;
  double a = 0.0;
  std::uint64_t n = 0;
  double seconds = 0.0;
  double throughput = 0.0;  // draws per second
  BranchCounters counters;
  double checksum = 0.0;  // sum of the draws
};

/// Times n draws of TN[a, inf) per (algorithm, a). Grid point i uses the
/// stream derive_seed(seed, i) for every algorithm.
std::vector<BenchRow> run_bench(const std::vector<BenchAlgorithm>& algorithms, const std::vector<double>& grid,
                                std::uint64_t n, std::uint64_t seed, const RegionTable& table);

/// Result of one acceptance criterion.
struct Check {
  int criterion = 0;
  std::string name;
  bool pass = false;
  std::string summary;  // one line, no newlines
  std::uint64_t nan_count = 0;
  nlohmann::json detail;
};

nlohmann::json to_json(const Check& c);

Check criterion_1_exactness(const RegionTable& table, std::uint64_t seed);
Check criterion_2_fast_path(const RegionTable& table, std::uint64_t seed);
Check criterion_3_memory(const RegionTable& table);
Check criterion_4_speed(const RegionTable& table, std::uint64_t seed);
Check criterion_5_semifinite_histogram(const RegionTable& table, std::uint64_t seed);
Check criterion_6_finite_histogram(const RegionTable& table, std::uint64_t seed);
Check criterion_7_sminus_floor(std::uint64_t seed);
Check criterion_8_mplus_regime();
Check criterion_9_domination(const RegionTable& table, std::uint64_t seed);
Check criterion_10_oracle_rates(const RegionTable& table, std::uint64_t seed);
Check criterion_11_chi_square(const RegionTable& table, std::uint64_t seed);
Check criterion_12_multivariate(const RegionTable& table, std::uint64_t seed);
/// prior_nans: non-finite values already counted by other checks.
Check criterion_13_stability(const RegionTable& table, std::uint64_t seed, std::uint64_t prior_nans);

/// Runs criterion k (1..13) with the stream derive_seed(seed, k).
Check run_criterion(int k, const RegionTable& table, std::uint64_t seed, std::uint64_t prior_nans = 0);

enum class Suite { Univariate, Bivariate, Multivariate, Bounds };

std::string_view to_string(Suite s);
/// Throws std::invalid_argument for an unknown name.
Suite parse_suite(std::string_view name);
/// Criteria run by a validation suite.
std::vector<int> suite_criteria(Suite s);

}  // namespace tgauss::experiments
