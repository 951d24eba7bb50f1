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
#include "tgauss/experiments.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

namespace tgauss::experiments {
namespace {

const RegionTable& table() {
  static const RegionTable t = build_table_for_stored(kDefaultStoredTarget);
  return t;
}

TEST(Laws, SemiFiniteOrderedAndInRange) {
  RandomStream s(3);
  for (int k = 0; k < 10000; ++k) {
    const SemiParams p = draw_semifinite_law(s);
    EXPECT_GE(p.a1, p.a2);
    EXPECT_LT(std::abs(p.rho), 1.0);
  }
}

TEST(Laws, BoxNonEmpty) {
  RandomStream s(4);
  for (int k = 0; k < 10000; ++k) {
    const BoxParams p = draw_box_law(s);
    EXPECT_LT(p.a1, p.b1);
    EXPECT_LT(p.a2, p.b2);
    EXPECT_LT(std::abs(p.rho), 1.0);
  }
}

TEST(Histogram, DeterministicAndSummarised) {
  for (Experiment e : {Experiment::Fig3, Experiment::Fig4}) {
    const auto h1 = run_histogram(e, 200, 100, 11, table());
    const auto h2 = run_histogram(e, 200, 100, 11, table());
    ASSERT_EQ(h1.rows.size(), 200u);
    for (std::size_t k = 0; k < h1.rows.size(); ++k) {
      EXPECT_EQ(h1.rows[k].rate, h2.rows[k].rate);
      EXPECT_EQ(h1.rows[k].accepted, h2.rows[k].accepted);
      EXPECT_GT(h1.rows[k].rate, 0.0);
      EXPECT_LE(h1.rows[k].rate, 1.0);
    }
    EXPECT_LE(h1.summary.min, h1.summary.q01);
    EXPECT_LE(h1.summary.q01, h1.summary.q10);
    EXPECT_LE(h1.summary.q10, h1.summary.median);
    EXPECT_NEAR(h1.summary.sigma_hat, 0.05, 1e-15);
    EXPECT_DOUBLE_EQ(h1.fraction_at_least(0.0), 1.0);
  }
}

TEST(Histogram, ProblemStreamsIndependentOfCount) {
  const auto small = run_histogram(Experiment::Fig3, 10, 50, 5, table());
  const auto large = run_histogram(Experiment::Fig3, 20, 50, 5, table());
  for (std::size_t k = 0; k < small.rows.size(); ++k) EXPECT_EQ(small.rows[k].rate, large.rows[k].rate);
}

TEST(Bench, RowsAndChecksums) {
  const auto rows = run_bench({BenchAlgorithm::Table, BenchAlgorithm::Inverse}, {-1.0, 1.5}, 20000, 9, table());
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.n, 20000u);
    EXPECT_TRUE(std::isfinite(r.checksum));
    EXPECT_GT(r.checksum / r.n, r.a);
    EXPECT_GE(r.counters.proposals, r.n);
  }
  EXPECT_EQ(rows[0].algorithm, "table");
  EXPECT_EQ(rows[1].algorithm, "inverse");
}

TEST(Names, RoundTrip) {
  for (BenchAlgorithm a :
       {BenchAlgorithm::Table, BenchAlgorithm::Devroye, BenchAlgorithm::GewekeRobert, BenchAlgorithm::Inverse})
    EXPECT_EQ(parse_bench_algorithm(to_string(a)), a);
  EXPECT_THROW(parse_bench_algorithm("ziggurat"), std::invalid_argument);
  std::set<int> all;
  for (Suite s : {Suite::Univariate, Suite::Bivariate, Suite::Multivariate, Suite::Bounds}) {
    EXPECT_EQ(parse_suite(to_string(s)), s);
    for (int k : suite_criteria(s)) EXPECT_TRUE(all.insert(k).second);
  }
  EXPECT_EQ(all.size(), 12u);  // the timing criterion runs in the acceptance binary only
  EXPECT_THROW(parse_suite("everything"), std::invalid_argument);
}

TEST(Checks, CheapCriteria) {
  const Check c3 = criterion_3_memory(table());
  EXPECT_TRUE(c3.pass) << c3.summary;
  EXPECT_EQ(c3.detail["bytes"].get<std::size_t>(), table().memory_bytes());
  const Check c7 = criterion_7_sminus_floor(1);
  EXPECT_TRUE(c7.pass) << c7.summary;
  EXPECT_NEAR(c7.detail["floor_value"].get<double>(), 0.41579500090963780945, 1e-9);
  const Check c8 = criterion_8_mplus_regime();
  EXPECT_TRUE(c8.pass) << c8.summary;
  EXPECT_EQ(to_json(c8)["criterion"], 8);
  EXPECT_THROW(run_criterion(14, table(), 1), std::out_of_range);
}

TEST(Version, StampAndFingerprint) {
  EXPECT_EQ(version_stamp().rfind("tgauss ", 0), 0u);
  const RegionTable other = build_table_for_stored(1000);
  EXPECT_NE(table_fingerprint(table()), table_fingerprint(other));
  EXPECT_EQ(table_fingerprint(table()), table_fingerprint(deserialize_table(serialize_table(table()))));
}

}  // namespace
}  // namespace tgauss::experiments
