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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

#include "tgauss/bivariate_finite.hpp"
#include "tgauss/bivariate_semifinite.hpp"
#include "tgauss/multivariate.hpp"
#include "tgauss/normal.hpp"
#include "tgauss/oracle.hpp"

#ifndef TGAUSS_VERSION
#define TGAUSS_VERSION "0.0.0"
#endif
#ifndef TGAUSS_REVISION
#define TGAUSS_REVISION "unknown"
#endif

namespace tgauss::experiments {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Lower empirical quantile: the smallest value with at least p n values at or below it.
double lower_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::nan("");
  const auto n = static_cast<double>(sorted.size());
  const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(p * n)));
  return sorted[std::min(k, sorted.size()) - 1];
}

double ks_critical(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

struct Counter {
  std::uint64_t nan = 0;
  void see(double x) { nan += !std::isfinite(x); }
};

}  // namespace

std::string version_stamp() { return fmt::format("tgauss {} ({})", TGAUSS_VERSION, TGAUSS_REVISION); }

std::uint64_t table_fingerprint(const RegionTable& table) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : serialize_table(table)) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SemiParams draw_semifinite_law(RandomStream& s, double scale) {
  SemiParams p;
  do p.rho = 2.0 * s.uniform() - 1.0;
  while (!(std::abs(p.rho) < kMaxAbsRho));
  p.a1 = scale * s.normal();
  p.a2 = scale * s.normal();
  if (p.a1 < p.a2) std::swap(p.a1, p.a2);
  return p;
}

BoxParams draw_box_law(RandomStream& s) {
  BoxParams p;
  p.a1 = 2.0 * s.normal();
  p.a2 = 2.0 * s.normal();
  do p.rho = 2.0 * s.uniform() - 1.0;
  while (!(std::abs(p.rho) < kMaxAbsRho));
  p.b1 = p.a1 + 2.0 * s.exponential(1.0);
  p.b2 = p.a2 + 2.0 * s.exponential(1.0);
  return p;
}

std::string_view to_string(Experiment e) { return e == Experiment::Fig3 ? "fig3" : "fig4"; }

double HistogramResult::fraction_at_least(double threshold) const {
  if (rows.empty()) return 0.0;
  std::size_t k = 0;
  for (const auto& r : rows) k += r.rate >= threshold;
  return static_cast<double>(k) / static_cast<double>(rows.size());
}

HistogramResult run_histogram(Experiment e, int n_problems, int n_props, std::uint64_t seed, const RegionTable& table) {
  if (n_problems <= 0 || n_props <= 0) throw std::invalid_argument("histogram: counts must be positive");
  HistogramResult out;
  out.experiment = e;
  out.rows.reserve(n_problems);
  for (int k = 0; k < n_problems; ++k) {
    RandomStream s(derive_seed(seed, static_cast<std::uint64_t>(k)));
    HistogramRow row;
    row.index = static_cast<std::uint64_t>(k);
    double sum = 0.0;
    if (e == Experiment::Fig3) {
      const SemiParams p = draw_semifinite_law(s);
      row.params = {p.rho, p.a1, kInf, p.a2, kInf};
      SemiFiniteSampler fs(p.rho, p.a1, p.a2, table);
      row.label = fs.independent() ? "independent" : std::string(to_string(fs.label()));
      for (int j = 0; j < n_props; ++j) {
        const SemiProposal r = fs.propose(s, true);
        sum += r.accept_prob;
        row.accepted += r.accepted;
      }
    } else {
      row.params = draw_box_law(s);
      const BoxParams& p = row.params;
      FiniteSampler fs(p.rho, p.a1, p.b1, p.a2, p.b2, table);
      row.label = fs.independent() ? "independent" : std::string(to_string(fs.label()));
      for (int j = 0; j < n_props; ++j) {
        const FiniteProposal r = fs.propose(s, true);
        sum += r.accept_prob;
        row.accepted += r.accepted;
      }
    }
    row.rate = sum / n_props;
    out.rows.push_back(std::move(row));
  }
  std::vector<double> rates;
  rates.reserve(out.rows.size());
  for (const auto& r : out.rows) rates.push_back(r.rate);
  std::sort(rates.begin(), rates.end());
  out.summary.problems = rates.size();
  out.summary.proposals = n_props;
  out.summary.min = rates.front();
  out.summary.q01 = lower_quantile(rates, 0.01);
  out.summary.q10 = lower_quantile(rates, 0.10);
  out.summary.median = lower_quantile(rates, 0.5);
  out.summary.sigma_hat = std::sqrt(0.25 / n_props);
  return out;
}

std::string_view to_string(BenchAlgorithm a) {
  switch (a) {
    case BenchAlgorithm::Table: return "table";
    case BenchAlgorithm::Devroye: return "devroye";
    case BenchAlgorithm::GewekeRobert: return "geweke-robert";
    case BenchAlgorithm::Inverse: return "inverse";
  }
  return "?";
}

BenchAlgorithm parse_bench_algorithm(std::string_view name) {
  for (BenchAlgorithm a :
       {BenchAlgorithm::Table, BenchAlgorithm::Devroye, BenchAlgorithm::GewekeRobert, BenchAlgorithm::Inverse})
    if (to_string(a) == name) return a;
  throw std::invalid_argument(fmt::format("unknown algorithm '{}'", name));
}

std::vector<BenchRow> run_bench(const std::vector<BenchAlgorithm>& algorithms, const std::vector<double>& grid,
                                std::uint64_t n, std::uint64_t seed, const RegionTable& table) {
  std::vector<BenchRow> rows;
  const SamplerConfig cfg;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid[i];
    for (BenchAlgorithm alg : algorithms) {
      RandomStream s(derive_seed(seed, i));
      BenchRow row;
      row.algorithm = std::string(to_string(alg));
      row.a = a;
      row.n = n;
      double sum = 0.0;
      const auto t0 = Clock::now();
      switch (alg) {
        case BenchAlgorithm::Table:
          for (std::uint64_t k = 0; k < n; ++k) sum += sample_lower(a, table, s, &row.counters);
          break;
        case BenchAlgorithm::Devroye:
          for (std::uint64_t k = 0; k < n; ++k) sum += devroye_composite(a, cfg, s, &row.counters);
          break;
        case BenchAlgorithm::GewekeRobert:
          for (std::uint64_t k = 0; k < n; ++k) sum += geweke_robert_composite(a, s, &row.counters);
          break;
        case BenchAlgorithm::Inverse:
          for (std::uint64_t k = 0; k < n; ++k) sum += inverse_transform_sample(a, s);
          row.counters.proposals = row.counters.accepted = n;
          break;
      }
      row.seconds = seconds_since(t0);
      row.throughput = row.seconds > 0.0 ? static_cast<double>(n) / row.seconds : 0.0;
      row.checksum = sum;
      rows.push_back(row);
    }
  }
  return rows;
}

json to_json(const Check& c) {
  return json{{"criterion", c.criterion}, {"name", c.name},           {"pass", c.pass},
              {"summary", c.summary},     {"nan_count", c.nan_count}, {"detail", c.detail}};
}

Check criterion_1_exactness(const RegionTable& table, std::uint64_t seed) {
  constexpr std::size_t kN = 1000000;
  // Naive rejection costs 1/mass normals per draw; it is exercised where that stays below 1000.
  constexpr double kNaiveMass = 1e-3;
  Check c{1, "univariate distributional exactness", true, "", 0, json::array()};
  RandomStream s(seed);
  const SamplerConfig cfg;
  Counter nan;
  double worst_ratio = 0.0;
  std::string worst;
  auto run = [&](const std::string& alg, double a, double b, const std::function<double()>& draw) {
    std::vector<double> x(kN);
    for (double& v : x) nan.see(v = draw());
    const auto r = oracle::ks_test(std::move(x), [&](double v) {
      return oracle::exact_cdf_tn(a, b, std::clamp(v, a, b));
    });
    const bool ok = r.statistic < ks_critical(kN);
    c.pass = c.pass && ok;
    c.detail.push_back({{"algorithm", alg}, {"a", a}, {"b", std::isfinite(b) ? json(b) : json("inf")},
                        {"ks", r.statistic}, {"critical", ks_critical(kN)}, {"pass", ok}});
    if (r.statistic / ks_critical(kN) > worst_ratio) {
      worst_ratio = r.statistic / ks_critical(kN);
      worst = fmt::format("{} [{}, {}]", alg, a, b);
    }
  };
  for (double a : {-2.0, -1.0, 0.0, 0.65, 1.0, 2.0, 3.0, 5.0, 9.5}) {
    run("table", a, kInf, [&] { return sample_lower(a, table, s); });
    run("devroye", a, kInf, [&] { return devroye_composite(a, cfg, s); });
    run("geweke-robert", a, kInf, [&] { return geweke_robert_composite(a, s); });
    run("inverse", a, kInf, [&] { return inverse_transform_sample(a, s); });
    if (Phi(-a) >= kNaiveMass) run("naive", a, kInf, [&] { return naive(a, kInf, s); });
  }
  const std::pair<double, double> intervals[] = {{-2.0, 2.0},   {-1.0, 0.5},  {-0.005, 0.005}, {0.0, 0.01},
                                                 {0.65, 0.66},  {1.0, 1.01},  {2.0, 3.0},      {3.0, 3.01},
                                                 {5.0, 5.01},   {9.5, 9.51},  {-3.0, -2.99},   {-6.0, 1.0}};
  for (const auto& [a, b] : intervals) {
    run("table", a, b, [&] { return sample_interval(a, b, table, cfg, s); });
    if (Phi(b) - Phi(a) >= kNaiveMass) run("naive", a, b, [&] { return naive(a, b, s); });
  }
  // Location-scale path, checked on the standardized scale.
  run("table-general", 0.25, 0.75, [&] { return (sample_general({1.0, 2.0, 0.5, 2.0}, table, cfg, s) - 0.5) / 2.0; });
  c.nan_count = nan.nan;
  c.pass = c.pass && nan.nan == 0;
  int exceed = 0;
  for (const auto& d : c.detail) exceed += !d["pass"].get<bool>();
  c.summary = fmt::format("{} KS runs at n=1e6: {} above critical {:.6f} ({:.2f} expected by chance at alpha 0.01), "
                          "worst KS/critical = {:.3f} ({})",
                          c.detail.size(), exceed, ks_critical(kN), 0.01 * c.detail.size(), worst_ratio, worst);
  return c;
}

Check criterion_2_fast_path(const RegionTable& table, std::uint64_t seed) {
  constexpr int kPoints = 200;
  constexpr std::uint64_t kProposals = 100000;
  Check c{2, "univariate fast-path acceptance", true, "", 0, json::object()};
  RandomStream s(seed);
  std::vector<double> rates;
  json points = json::array();
  int below = 0;
  double worst = 1.0, worst_a = 0.0;
  for (int k = 0; k < kPoints; ++k) {
    const double a = table.a_min + (table.a_max - table.a_min) * k / (kPoints - 1);
    BranchCounters bc;
    while (bc.proposals < kProposals) sample_lower(a, table, s, &bc);
    const double rate = bc.acceptance();
    const double floor = 0.95 - 3.0 * std::sqrt(0.95 * 0.05 / static_cast<double>(bc.proposals));
    below += rate < floor;
    if (rate < worst) worst = rate, worst_a = a;
    rates.push_back(rate);
    points.push_back({{"a", a}, {"proposals", bc.proposals}, {"acceptance", rate}, {"pass", rate >= floor}});
  }
  std::vector<double> sorted = rates;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[kPoints / 2 - 1] + sorted[kPoints / 2]);
  c.pass = below == 0 && median >= 0.99;
  c.detail = {{"stored_regions", table.stored_count()}, {"a_min", table.a_min}, {"a_max", table.a_max},
              {"median", median}, {"min", worst}, {"argmin", worst_a}, {"points_below_floor", below},
              {"points", points}};
  c.summary = fmt::format("N_s={} grid [{:.3f}, {:.3f}]: min {:.4f} at a={:.3f}, {} of {} points below 0.95-3sd, median {:.4f}",
                          table.stored_count(), table.a_min, table.a_max, worst, worst_a, below, kPoints, median);
  return c;
}

Check criterion_3_memory(const RegionTable& table) {
  Check c{3, "table memory", false, "", 0, json::object()};
  const std::size_t bytes = table.memory_bytes();
  c.pass = table.stored_count() >= kDefaultStoredTarget && bytes <= 200000;
  c.detail = {{"stored_regions", table.stored_count()}, {"N", table.N}, {"bytes", bytes}, {"limit", 200000}};
  c.summary = fmt::format("N_s={} (N={}) uses {} bytes ({:.1f} kB), limit 200 kB", table.stored_count(), table.N, bytes,
                          bytes / 1000.0);
  return c;
}

Check criterion_4_speed(const RegionTable& table, std::uint64_t seed) {
  constexpr std::uint64_t kN = 10000000;
  Check c{4, "relative speed vs Geweke-Robert", true, "", 0, json::array()};
  std::vector<double> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(-2.0 + 0.5 * k);
  const auto rows = run_bench({BenchAlgorithm::Table, BenchAlgorithm::GewekeRobert}, grid, kN, seed, table);
  double ratio_at_0 = 0.0, worst = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const BenchRow& t = rows[2 * i];
    const BenchRow& g = rows[2 * i + 1];
    const double ratio = t.throughput / g.throughput;
    if (!std::isfinite(t.checksum) || !std::isfinite(g.checksum)) ++c.nan_count;
    c.pass = c.pass && ratio >= 1.0;
    worst = std::min(worst, ratio);
    if (grid[i] == 0.0) ratio_at_0 = ratio;
    c.detail.push_back({{"a", grid[i]}, {"table_per_s", t.throughput}, {"geweke_robert_per_s", g.throughput},
                        {"ratio", ratio}});
  }
  c.pass = c.pass && c.nan_count == 0;
  c.summary = fmt::format("table/GR throughput at 1e7 draws: min ratio {:.2f} over a in [-2, 2]; ratio at a=0 {:.2f} "
                          "(soft target 1.5: {})",
                          worst, ratio_at_0, ratio_at_0 >= 1.5 ? "met" : "not met");
  return c;
}

namespace {

Check histogram_check(int id, const char* name, Experiment e, double floor, double q10_level, double q01_level,
                      const RegionTable& table, std::uint64_t seed) {
  Check c{id, name, false, "", 0, json::object()};
  const auto t0 = Clock::now();
  const HistogramResult h = run_histogram(e, 10000, 1000, seed, table);
  const double secs = seconds_since(t0);
  for (const auto& r : h.rows) c.nan_count += !std::isfinite(r.rate);
  const double f10 = h.fraction_at_least(q10_level);
  const double f01 = h.fraction_at_least(q01_level);
  const double min_floor = floor - 3.0 * h.summary.sigma_hat;
  const bool ok_min = h.summary.min >= min_floor;
  c.pass = ok_min && f10 >= 0.90 && f01 >= 0.99 && c.nan_count == 0;
  std::map<std::string, int> labels;
  const HistogramRow* worst = &h.rows.front();
  for (const auto& r : h.rows) {
    ++labels[r.label];
    if (r.rate < worst->rate) worst = &r;
  }
  c.detail = {{"problems", h.summary.problems}, {"proposals", h.summary.proposals}, {"min", h.summary.min},
              {"q01", h.summary.q01}, {"q10", h.summary.q10}, {"median", h.summary.median},
              {"sigma_hat", h.summary.sigma_hat}, {"min_threshold", min_floor},
              {"fraction_at_least_q10_level", f10}, {"fraction_at_least_q01_level", f01}, {"labels", labels},
              {"worst", {{"rho", worst->params.rho}, {"a1", worst->params.a1},
                         {"b1", std::isfinite(worst->params.b1) ? json(worst->params.b1) : json("inf")},
                         {"a2", worst->params.a2},
                         {"b2", std::isfinite(worst->params.b2) ? json(worst->params.b2) : json("inf")},
                         {"label", worst->label}, {"rate", worst->rate}}},
              {"seconds", secs}};
  c.summary = fmt::format("1e4 x 1e3: min {:.4f} (need >= {:.4f}), {:.2f}% >= {} (need 90%), {:.2f}% >= {} (need 99%), "
                          "q10 {:.3f}, q1 {:.3f}, {:.0f} s",
                          h.summary.min, min_floor, 100.0 * f10, q10_level, 100.0 * f01, q01_level, h.summary.q10,
                          h.summary.q01, secs);
  return c;
}

}  // namespace

Check criterion_5_semifinite_histogram(const RegionTable& table, std::uint64_t seed) {
  return histogram_check(5, "semi-finite acceptance histogram", Experiment::Fig3, 0.5, 0.78, 0.63, table, seed);
}

Check criterion_6_finite_histogram(const RegionTable& table, std::uint64_t seed) {
  return histogram_check(6, "finite-box acceptance histogram", Experiment::Fig4, 0.47, 0.69, 0.53, table, seed);
}

Check criterion_7_sminus_floor(std::uint64_t) {
  Check c{7, "S- lower bound", false, "", 0, json::object()};
  const auto fq = oracle::sminus_floor_quadrature();
  double worst = 1.0;
  json at;
  int points = 0, unconverged = 0;
  for (double rho : {-0.999, -0.99, -0.95, -0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, -0.2, -0.1, -0.05, -0.01}) {
    for (int i = 0; i <= 30; ++i) {
      const double a1 = 0.2 * i;
      for (int j = 0; j <= 8; ++j) {
        const double a2 = rho * a1 + (a1 - rho * a1) * j / 8.0;
        const auto r = oracle::semifinite_acceptance(rho, a1, a2);
        if (r.label != "S-") continue;
        ++points;
        unconverged += !r.converged;
        if (!std::isfinite(r.rate)) ++c.nan_count;
        if (r.rate < worst) worst = r.rate, at = {{"rho", rho}, {"a1", a1}, {"a2", a2}};
      }
    }
  }
  const bool fq_ok = fq.converged && std::abs(fq.value - 0.416) <= 0.005;
  c.pass = fq_ok && worst >= 0.416 && unconverged == 0 && c.nan_count == 0;
  c.detail = {{"floor_value", fq.value}, {"floor_error", fq.error_estimate}, {"grid_points", points},
              {"grid_min", worst}, {"argmin", at}, {"unconverged", unconverged}};
  c.summary = fmt::format("half-normal floor quadrature {:.5f} (0.416 +/- 0.005); S- oracle grid min {:.4f} over {} points (need >= 0.416)",
                          fq.value, worst, points);
  return c;
}

Check criterion_8_mplus_regime() {
  Check c{8, "M+ regime lower bound", false, "", 0, json::object()};
  double worst = 1.0;
  json at;
  int points = 0, unconverged = 0;
  for (double rho : {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
    const double nu = std::sqrt((1.0 - rho) * (1.0 + rho));
    for (int i = 0; i <= 30; ++i) {
      const double a1 = 0.5 * i;
      for (int j = 0; j <= 16; ++j) {
        const double a2 = a1 - 0.5 * j;
        if (!((a2 - rho * a1) / nu > kChiDoubling)) continue;
        const auto r = oracle::semifinite_acceptance(rho, a1, a2);
        if (r.label != "M+") continue;
        ++points;
        unconverged += !r.converged;
        if (!std::isfinite(r.rate)) ++c.nan_count;
        if (r.rate < worst) worst = r.rate, at = {{"rho", rho}, {"a1", a1}, {"a2", a2}};
      }
    }
  }
  c.pass = points > 0 && worst >= 0.22 && unconverged == 0 && c.nan_count == 0;
  c.detail = {{"grid_points", points}, {"grid_min", worst}, {"argmin", at}, {"unconverged", unconverged}};
  c.summary = fmt::format("M+ oracle grid with (a2-rho a1)/nu > 3.117: min {:.4f} over {} points (need >= 0.22)", worst,
                          points);
  return c;
}

Check criterion_9_domination(const RegionTable& table, std::uint64_t seed) {
  constexpr int kPerProblem = 100;
  constexpr int kProblemsPerCase = 1667;
  Check c{9, "envelope domination", false, "", 0, json::object()};
  RandomStream s(seed);
  std::map<std::string, int> problems, violations;
  std::uint64_t evaluations = 0;
  json first_violation;
  auto note = [&](const std::string& label, bool bad, const json& where) {
    ++evaluations;
    if (bad) {
      if (violations[label]++ == 0 && first_violation.is_null()) first_violation = where;
    }
  };
  for (int guard = 0; guard < 10000000; ++guard) {
    bool done = true;
    for (const char* l : {"S+", "S-", "M+", "M-"}) done = done && problems[l] >= kProblemsPerCase;
    if (done) break;
    const SemiParams p = draw_semifinite_law(s, guard % 2 ? 2.0 : 1.0);
    SemiFiniteSampler fs(p.rho, p.a1, p.a2, table);
    if (fs.independent()) continue;
    const std::string label(to_string(fs.label()));
    if (problems[label] >= kProblemsPerCase) continue;
    ++problems[label];
    const double a1 = fs.problem().a1;
    for (int j = 0; j < kPerProblem; ++j) {
      const double x = a1 + 6.0 * (j + s.uniform()) / kPerProblem;
      const double t = fs.target(x), e = fs.envelope(x);
      if (!std::isfinite(t) || !std::isfinite(e)) ++c.nan_count;
      note(label, !(t <= e * (1.0 + 1e-9)), {{"label", label}, {"rho", p.rho}, {"a1", p.a1}, {"a2", p.a2}, {"x1", x}});
    }
  }
  for (int guard = 0; guard < 10000000; ++guard) {
    if (problems["M3"] >= kProblemsPerCase && problems["T"] >= kProblemsPerCase) break;
    const BoxParams p = draw_box_law(s);
    FiniteSampler fs(p.rho, p.a1, p.b1, p.a2, p.b2, table);
    if (fs.independent()) continue;
    const std::string label(to_string(fs.label()));
    if (problems[label] >= kProblemsPerCase) continue;
    ++problems[label];
    const FiniteProblem& q = fs.problem();
    for (int j = 0; j < kPerProblem; ++j) {
      const double x = q.a1 + (q.b1 - q.a1) * (j + s.uniform()) / kPerProblem;
      const double t = fs.log_target(x), e = fs.log_envelope(x);
      if (std::isnan(t) || std::isnan(e)) ++c.nan_count;
      note(label, !(t <= e + 1e-9),
           {{"label", label}, {"rho", p.rho}, {"a1", p.a1}, {"b1", p.b1}, {"a2", p.a2}, {"b2", p.b2}, {"x1", x}});
    }
  }
  int total = 0;
  for (const auto& [k, v] : violations) total += v;
  c.pass = total == 0 && evaluations >= 1000000 && c.nan_count == 0;
  c.detail = {{"evaluations", evaluations}, {"problems", problems}, {"violations", violations},
              {"first_violation", first_violation}};
  c.summary = fmt::format("{} (problem, x1) evaluations over S+, S-, M+, M-, M3, T: {} violations", evaluations, total);
  return c;
}

Check criterion_10_oracle_rates(const RegionTable& table, std::uint64_t seed) {
  constexpr int kProps = 100000;
  Check c{10, "oracle vs empirical acceptance", true, "", 0, json::array()};
  RandomStream s(seed);
  const std::map<std::string, int> quota = {{"S+", 9}, {"S-", 9}, {"M+", 9}, {"M-", 9}, {"M3", 7}, {"T", 7}};
  std::map<std::string, int> have;
  double worst_z = 0.0;
  int failures = 0;
  auto record = [&](const std::string& label, const json& params, double oracle_rate, bool converged,
                    std::uint64_t accepted) {
    const double emp = static_cast<double>(accepted) / kProps;
    const double se = std::sqrt(oracle_rate * (1.0 - oracle_rate) / kProps);
    const double z = se > 0.0 ? std::abs(emp - oracle_rate) / se : (emp == oracle_rate ? 0.0 : kInf);
    const bool ok = converged && z <= 3.0;
    failures += !ok;
    worst_z = std::max(worst_z, z);
    if (!std::isfinite(oracle_rate)) ++c.nan_count;
    c.detail.push_back({{"label", label}, {"params", params}, {"oracle", oracle_rate}, {"empirical", emp},
                        {"se", se}, {"z", z}, {"pass", ok}});
  };
  while (have["S+"] < 9 || have["S-"] < 9 || have["M+"] < 9 || have["M-"] < 9) {
    const SemiParams p = draw_semifinite_law(s);
    SemiFiniteSampler fs(p.rho, p.a1, p.a2, table);
    if (fs.independent()) continue;
    const std::string label(to_string(fs.label()));
    if (have[label] >= quota.at(label)) continue;
    ++have[label];
    const auto o = oracle::semifinite_acceptance(p.rho, p.a1, p.a2);
    std::uint64_t acc = 0;
    for (int j = 0; j < kProps; ++j) acc += fs.propose(s).accepted;
    record(label, {{"rho", p.rho}, {"a1", p.a1}, {"a2", p.a2}}, o.rate, o.converged && o.label == label, acc);
  }
  while (have["M3"] < 7 || have["T"] < 7) {
    const BoxParams p = draw_box_law(s);
    FiniteSampler fs(p.rho, p.a1, p.b1, p.a2, p.b2, table);
    if (fs.independent()) continue;
    const std::string label(to_string(fs.label()));
    if (have[label] >= quota.at(label)) continue;
    ++have[label];
    std::vector<double> tangents;
    if (fs.label() == FiniteCase::T) {
      tangents.push_back(fs.tangent().v);
      if (fs.tangent().count == 2) tangents.push_back(fs.tangent().w);
    }
    const auto o = oracle::finite_acceptance(fs.problem(), 2.0, LeftWeightRule::Literal, tangents);
    std::uint64_t acc = 0;
    for (int j = 0; j < kProps; ++j) acc += fs.propose(s).accepted;
    record(label, {{"rho", p.rho}, {"a1", p.a1}, {"b1", p.b1}, {"a2", p.a2}, {"b2", p.b2}}, o.rate,
           o.converged && o.label == label, acc);
  }
  c.pass = failures == 0 && c.nan_count == 0;
  c.summary = fmt::format("{} problems (9 each S+, S-, M+, M-; 7 each M3, T) at 1e5 proposals: {} outside 3 SE, max |z| {:.2f}",
                          c.detail.size(), failures, worst_z);
  return c;
}

Check criterion_11_chi_square(const RegionTable& table, std::uint64_t seed) {
  constexpr int kN = 200000;
  Check c{11, "bivariate chi-square exactness", true, "", 0, json::array()};
  RandomStream s(seed);
  const SemiParams semi[] = {{0.5, 0.0, 0.0},   {-0.5, 0.3, -0.2}, {0.9, 2.5, 1.0},  {-0.8, 0.5, 0.45},
                             {0.3, -1.0, -2.0}, {0.95, 1.0, 0.0},  {-0.95, 1.0, 0.5}, {0.7, 2.0, -1.0},
                             {-0.3, -0.2, -1.0}, {0.6, 0.5, 1.5}};
  const BoxParams box[] = {{0.5, -1.0, 1.0, -1.0, 1.0}, {0.9, 0.0, 3.0, 0.5, 0.7},   {-0.7, -2.0, 2.0, 1.0, 3.0},
                           {0.3, -5.0, 5.0, -5.0, 5.0}, {0.95, 1.0, 2.0, 1.0, 1.1},  {0.6, -3.0, 0.0, -0.2, 4.0},
                           {-0.9, 0.5, 3.5, -2.0, 1.0}, {0.6, -4.0, 6.0, -1.0, 2.5}, {0.2, 2.0, 2.5, -1.0, 3.0},
                           {-0.3, -0.5, 0.5, -3.0, -1.5}};
  double worst = 1.0;
  auto record = [&](const std::string& label, const json& params, const oracle::Chi2Result& r) {
    const bool ok = r.p_value > 1e-3;
    c.pass = c.pass && ok;
    worst = std::min(worst, r.p_value);
    c.detail.push_back({{"label", label}, {"params", params}, {"statistic", r.statistic}, {"dof", r.dof},
                        {"p_value", r.p_value}, {"pass", ok}});
  };
  for (const SemiParams& p : semi) {
    SemiFiniteSampler fs(p.rho, p.a1, p.a2, table);
    const auto r = oracle::chi2_grid(p.rho, p.a1, kInf, p.a2, kInf, kN, [&] {
      const auto xy = fs.sample(s);
      c.nan_count += !std::isfinite(xy.first) + !std::isfinite(xy.second);
      return xy;
    });
    record(std::string(to_string(fs.label())), {{"rho", p.rho}, {"a1", p.a1}, {"a2", p.a2}}, r);
  }
  for (const BoxParams& p : box) {
    FiniteSampler fs(p.rho, p.a1, p.b1, p.a2, p.b2, table);
    const auto r = oracle::chi2_grid(p.rho, p.a1, p.b1, p.a2, p.b2, kN, [&] {
      const auto xy = fs.sample(s);
      c.nan_count += !std::isfinite(xy.first) + !std::isfinite(xy.second);
      return xy;
    });
    record(std::string(to_string(fs.label())),
           {{"rho", p.rho}, {"a1", p.a1}, {"b1", p.b1}, {"a2", p.a2}, {"b2", p.b2}}, r);
  }
  c.pass = c.pass && c.nan_count == 0;
  c.summary = fmt::format("10 semi-finite + 10 finite problems, 20x20 cells, n=2e5: min p-value {:.4g} (need > 0.001)",
                          worst);
  return c;
}

Check criterion_12_multivariate(const RegionTable& table, std::uint64_t seed) {
  constexpr int kN = 100000;
  Check c{12, "multivariate chains", true, "", 0, json::array()};
  RandomStream s(seed);
  auto equi = [](int d, double r) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, r);
    m.diagonal().setOnes();
    return m;
  };
  Eigen::MatrixXd mixed = equi(3, 0.3);
  mixed(0, 1) = mixed(1, 0) = 0.6;
  Eigen::MatrixXd neg4 = equi(4, -0.15);
  neg4(0, 3) = neg4(3, 0) = -0.05;
  struct Case {
    const char* name;
    Eigen::MatrixXd Sigma;
    Eigen::VectorXd a;
  };
  const Case cases[] = {{"equicorrelated 0.5, d=3", equi(3, 0.5), Eigen::Vector3d(0.0, 0.0, 0.0)},
                        {"mixed, d=3", mixed, Eigen::Vector3d(0.8, 0.1, -0.5)},
                        {"equicorrelated 0.3, d=4", equi(4, 0.3), Eigen::Vector4d(0.5, 0.2, 0.0, -0.3)},
                        {"equicorrelated -0.3, d=3", equi(3, -0.3), Eigen::Vector3d(0.5, 0.5, 0.5)},
                        {"negative, d=4", neg4, Eigen::Vector4d(0.4, 0.3, 0.2, 0.1)}};
  int moment_failures = 0, floor_failures = 0;
  for (const Case& k : cases) {
    const int d = static_cast<int>(k.Sigma.rows());
    MultivariateSampler ms(k.Sigma, k.a, table);
    json row = {{"problem", k.name}, {"d", d}};
    if (!ms.applicable()) {
      c.pass = false;
      row["error"] = ms.failure().message();
      c.detail.push_back(row);
      continue;
    }
    MultivariateStats st;
    Eigen::MatrixXd draws(kN, d);
    for (int j = 0; j < kN; ++j) {
      const auto r = ms.try_sample(s, &st);
      const Eigen::VectorXd& x = std::get<Eigen::VectorXd>(r);
      for (int i = 0; i < d; ++i) c.nan_count += !std::isfinite(x(i));
      draws.row(j) = x.transpose();
    }
    const double floor = std::pow(2.0, -(d - 1));
    const double sd = std::sqrt(floor * (1.0 - floor) / static_cast<double>(st.head_proposals));
    const bool floor_ok = st.acceptance() >= floor - 3.0 * sd;
    floor_failures += !floor_ok;
    const auto ref = oracle::brute_force_box_sampler(k.Sigma, k.a, Eigen::VectorXd::Constant(d, kInf), kN, s);
    const auto m = oracle::moments(draws);
    const auto r = oracle::moments(ref.draws);
    double worst_z = 0.0;
    for (int i = 0; i < d; ++i) {
      worst_z = std::max(worst_z, std::abs(m.mean(i) - r.mean(i)) / std::hypot(m.mean_se(i), r.mean_se(i)));
      for (int j = 0; j <= i; ++j)
        worst_z = std::max(worst_z, std::abs(m.cov(i, j) - r.cov(i, j)) / std::hypot(m.cov_se(i, j), r.cov_se(i, j)));
    }
    const bool moments_ok = worst_z <= 3.0;
    moment_failures += !moments_ok;
    row.update({{"chain", *ms.chain() == Chain::SPlus ? "S+" : "S-"}, {"acceptance", st.acceptance()},
                {"floor", floor}, {"floor_pass", floor_ok}, {"max_moment_z", worst_z}, {"moments_pass", moments_ok}});
    c.detail.push_back(row);
  }
  c.pass = c.pass && floor_failures == 0 && moment_failures == 0 && c.nan_count == 0;
  c.summary = fmt::format("{} problems (d=3, 4; both chains), n=1e5: {} acceptance-floor failures, {} moment failures",
                          c.detail.size(), floor_failures, moment_failures);
  return c;
}

Check criterion_13_stability(const RegionTable& table, std::uint64_t seed, std::uint64_t prior_nans) {
  Check c{13, "numerical stability", false, "", 0, json::object()};
  RandomStream s(seed);
  const SamplerConfig cfg;
  std::uint64_t bad_inverse = 0, bad_table = 0, bad_other = 0, draws = 0;
  for (double a = -2.0; a <= 37.0 + 1e-9; a += 0.25)
    for (int k = 0; k < 1000; ++k, ++draws) {
      const double x = inverse_transform_sample(a, s);
      bad_inverse += !(std::isfinite(x) && x >= a);
    }
  for (double a = -2.0; a <= 30.0 + 1e-9; a += 0.25)
    for (int k = 0; k < 1000; ++k, ++draws) {
      const double x = sample_lower(a, table, s);
      const double y = sample_interval(a, a + 0.01, table, cfg, s);
      bad_table += !(std::isfinite(x) && x >= a) + !(std::isfinite(y) && y >= a && y <= a + 0.01);
    }
  for (int k = 0; k < 2000; ++k) {
    const SemiParams p = draw_semifinite_law(s, 3.0);
    SemiFiniteSampler fs(p.rho, p.a1, p.a2, table);
    const BoxParams q = draw_box_law(s);
    FiniteSampler gs(q.rho, q.a1, q.b1, q.a2, q.b2, table);
    for (int j = 0; j < 5; ++j, draws += 2) {
      const auto [x1, x2] = fs.sample(s);
      const auto [y1, y2] = gs.sample(s);
      bad_other += !(std::isfinite(x1) && std::isfinite(x2) && std::isfinite(y1) && std::isfinite(y2));
    }
  }
  c.nan_count = bad_inverse + bad_table + bad_other;
  c.pass = c.nan_count == 0 && prior_nans == 0;
  c.detail = {{"draws", draws}, {"inverse_non_finite", bad_inverse}, {"table_non_finite", bad_table},
              {"bivariate_non_finite", bad_other}, {"other_suites_non_finite", prior_nans}};
  c.summary = fmt::format("inverse a<=37, table a<=30, bivariate draws: {} non-finite of {}; other checks: {} non-finite",
                          c.nan_count, draws, prior_nans);
  return c;
}

Check run_criterion(int k, const RegionTable& table, std::uint64_t seed, std::uint64_t prior_nans) {
  const std::uint64_t sub = derive_seed(seed, static_cast<std::uint64_t>(k));
  switch (k) {
    case 1: return criterion_1_exactness(table, sub);
    case 2: return criterion_2_fast_path(table, sub);
    case 3: return criterion_3_memory(table);
    case 4: return criterion_4_speed(table, sub);
    case 5: return criterion_5_semifinite_histogram(table, sub);
    case 6: return criterion_6_finite_histogram(table, sub);
    case 7: return criterion_7_sminus_floor(sub);
    case 8: return criterion_8_mplus_regime();
    case 9: return criterion_9_domination(table, sub);
    case 10: return criterion_10_oracle_rates(table, sub);
    case 11: return criterion_11_chi_square(table, sub);
    case 12: return criterion_12_multivariate(table, sub);
    case 13: return criterion_13_stability(table, sub, prior_nans);
    default: throw std::out_of_range(fmt::format("no criterion {}", k));
  }
}

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::Univariate: return "univariate";
    case Suite::Bivariate: return "bivariate";
    case Suite::Multivariate: return "multivariate";
    case Suite::Bounds: return "bounds";
  }
  return "?";
}

Suite parse_suite(std::string_view name) {
  for (Suite s : {Suite::Univariate, Suite::Bivariate, Suite::Multivariate, Suite::Bounds})
    if (to_string(s) == name) return s;
  throw std::invalid_argument(fmt::format("unknown suite '{}'", name));
}

std::vector<int> suite_criteria(Suite s) {
  switch (s) {
    case Suite::Univariate: return {1, 2, 3, 13};
    case Suite::Bivariate: return {5, 6, 9, 10, 11};
    case Suite::Multivariate: return {12};
    case Suite::Bounds: return {7, 8};
  }
  return {};
}

}  // namespace tgauss::experiments
