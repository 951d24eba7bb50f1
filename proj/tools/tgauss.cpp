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
// tgauss command-line front end. Exit codes: 0 success, 1 validation
// failure, 2 usage or parameter error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "tgauss/bivariate_finite.hpp"
#include "tgauss/bivariate_semifinite.hpp"
#include "tgauss/experiments.hpp"
#include "tgauss/multivariate.hpp"
#include "tgauss/tables.hpp"
#include "tgauss/univariate.hpp"

namespace {

using nlohmann::json;
using namespace tgauss;
namespace ex = tgauss::experiments;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr char kSampleMagic[8] = {'T', 'G', 'S', 'A', 'M', 'P', '0', '1'};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TableSource {
  std::string path;  // empty: built in memory at the default size
  RegionTable table;
};

TableSource open_table(const std::string& flag) {
  TableSource src;
  src.path = flag;
  if (src.path.empty()) {
    if (const char* env = std::getenv("TGAUSS_TABLE")) src.path = env;
  }
  if (src.path.empty()) {
    src.table = build_table_for_stored(kDefaultStoredTarget);
  } else {
    try {
      src.table = load_table(src.path);
    } catch (const std::exception& e) {
      throw UsageError(fmt::format("cannot load table '{}': {}", src.path, e.what()));
    }
  }
  return src;
}

json table_identity(const TableSource& src) {
  return {{"path", src.path.empty() ? json(nullptr) : json(src.path)},
          {"fingerprint", fmt::format("{:016x}", ex::table_fingerprint(src.table))},
          {"N", src.table.N},
          {"stored_regions", src.table.stored_count()},
          {"bytes", src.table.memory_bytes()}};
}

json manifest(const std::string& sub, std::uint64_t seed, const TableSource* src, json params) {
  json m = {{"schema", "tgauss-manifest/1"}, {"subcommand", sub}, {"version", ex::version_stamp()}, {"seed", seed},
            {"parameters", std::move(params)}};
  if (src) m["table"] = table_identity(*src);
  return m;
}

json real(double x) { return std::isfinite(x) ? json(x) : json(x > 0 ? "inf" : "-inf"); }

class Output {
 public:
  explicit Output(const std::string& path, bool binary = false) {
    if (!path.empty() && path != "-") {
      file_.open(path, binary ? std::ios::binary : std::ios::out);
      if (!file_) throw UsageError(fmt::format("cannot open '{}' for writing", path));
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double x) {
  std::uint64_t v;
  std::memcpy(&v, &x, 8);
  put_u64(os, v);
}

// Rows of draws in the requested format with the manifest embedded.
void write_samples(const std::vector<std::vector<double>>& rows, const std::vector<std::string>& columns,
                   const json& m, const std::string& format, const std::string& out) {
  if (format == "csv") {
    Output o(out);
    std::ostream& os = o.stream();
    os << "# " << m.dump() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt::format("{:.17g}", r[i]);
      os << '\n';
    }
  } else if (format == "json") {
    Output o(out);
    json doc = {{"manifest", m}, {"columns", columns}, {"draws", rows}};
    o.stream() << doc.dump() << '\n';
  } else {
    // magic, u64 manifest length, manifest bytes, u64 rows, u64 columns,
    // then row-major little-endian doubles.
    Output o(out, true);
    std::ostream& os = o.stream();
    const std::string text = m.dump();
    os.write(kSampleMagic, sizeof kSampleMagic);
    put_u64(os, text.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_u64(os, rows.size());
    put_u64(os, columns.size());
    for (const auto& r : rows)
      for (double x : r) put_f64(os, x);
  }
}

// --- gen-tables ------------------------------------------------------------

struct GenTablesArgs {
  int ns = kDefaultStoredTarget;
  std::string out;
};

int cmd_gen_tables(const GenTablesArgs& a) {
  if (a.ns < 8) throw UsageError("--ns must be at least 8");
  const RegionTable t = build_table_for_stored(a.ns);
  validate_table(t);
  save_table(t, a.out);
  fmt::print("table N={} stored_regions={} a_min={} a_max={:.6f} v={:.17g}\n", t.N, t.stored_count(), t.a_min,
             t.a_max, t.v);
  fmt::print("footprint {} bytes ({:.1f} kB)\n", t.memory_bytes(), t.memory_bytes() / 1000.0);
  fmt::print("fingerprint {:016x}\n", ex::table_fingerprint(t));
  return 0;
}

// --- sample ----------------------------------------------------------------

struct SampleArgs {
  std::string dist;
  double a = -kInf, b = kInf, mu = 0.0, sigma = 1.0;
  double rho = 0.0, a1 = 0.0, b1 = kInf, a2 = 0.0, b2 = kInf;
  std::vector<double> cov, lower;
  std::uint64_t n = 10, seed = 1;
  std::string format = "csv", out, table;
};

int cmd_sample(const SampleArgs& a) {
  TableSource src = open_table(a.table);
  RandomStream s(a.seed);
  std::vector<std::vector<double>> rows;
  rows.reserve(a.n);
  std::vector<std::string> columns;
  json params = {{"dist", a.dist}, {"n", a.n}, {"format", a.format}};
  try {
    if (a.dist == "tn1") {
      params.update({{"a", real(a.a)}, {"b", real(a.b)}, {"mu", a.mu}, {"sigma", a.sigma}});
      const UnivariateSpec spec{a.a, a.b, a.mu, a.sigma};
      const SamplerConfig cfg;
      columns = {"x"};
      for (std::uint64_t i = 0; i < a.n; ++i) rows.push_back({sample_general(spec, src.table, cfg, s)});
    } else if (a.dist == "tn2-semi") {
      params.update({{"rho", a.rho}, {"a1", a.a1}, {"a2", a.a2}});
      SemiFiniteSampler fs(a.rho, a.a1, a.a2, src.table);
      params["case"] = fs.independent() ? "independent" : std::string(to_string(fs.label()));
      columns = {"x1", "x2"};
      for (std::uint64_t i = 0; i < a.n; ++i) {
        const auto [x1, x2] = fs.sample(s);
        rows.push_back({x1, x2});
      }
    } else if (a.dist == "tn2-box") {
      params.update({{"rho", a.rho}, {"a1", a.a1}, {"b1", real(a.b1)}, {"a2", a.a2}, {"b2", real(a.b2)}});
      FiniteSampler fs(a.rho, a.a1, a.b1, a.a2, a.b2, src.table);
      params["case"] = fs.independent() ? "independent" : std::string(to_string(fs.label()));
      columns = {"x1", "x2"};
      for (std::uint64_t i = 0; i < a.n; ++i) {
        const auto [x1, x2] = fs.sample(s);
        rows.push_back({x1, x2});
      }
    } else {
      const auto d = static_cast<Eigen::Index>(a.lower.size());
      if (static_cast<Eigen::Index>(a.cov.size()) != d * d)
        throw std::invalid_argument(fmt::format("--cov needs d*d = {} values for d = {}, got {}", d * d, d, a.cov.size()));
      const Eigen::MatrixXd Sigma = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          a.cov.data(), d, d);
      const Eigen::VectorXd lo = Eigen::Map<const Eigen::VectorXd>(a.lower.data(), d);
      params.update({{"cov", a.cov}, {"lower", a.lower}});
      MultivariateSampler ms(Sigma, lo, src.table);
      if (!ms.applicable()) {
        std::cerr << "tgauss: not applicable: " << ms.failure().message() << '\n';
        return kExitUsage;
      }
      params["chain"] = *ms.chain() == Chain::SPlus ? "S+" : "S-";
      for (Eigen::Index i = 0; i < d; ++i) columns.push_back(fmt::format("x{}", i + 1));
      for (std::uint64_t i = 0; i < a.n; ++i) {
        const Eigen::VectorXd x = ms.sample_chain(*ms.chain(), s);
        rows.emplace_back(x.data(), x.data() + d);
      }
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  write_samples(rows, columns, manifest("sample", a.seed, &src, params), a.format, a.out);
  return 0;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> algorithms = {"table", "devroye", "geweke-robert", "inverse"};
  std::vector<double> grid;
  double from = -2.0, to = 3.0, step = 0.25;
  std::uint64_t n = 10000000, seed = 1;
  std::string out, table;
};

int cmd_bench(const BenchArgs& a) {
  TableSource src = open_table(a.table);
  std::vector<ex::BenchAlgorithm> algs;
  try {
    for (const auto& name : a.algorithms) algs.push_back(ex::parse_bench_algorithm(name));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<double> grid = a.grid;
  if (grid.empty()) {
    if (!(a.step > 0.0) || a.to < a.from) throw UsageError("bench grid needs --from <= --to and --step > 0");
    const int k = static_cast<int>(std::floor((a.to - a.from) / a.step + 1e-9));
    for (int i = 0; i <= k; ++i) grid.push_back(a.from + a.step * i);
  }
  const auto rows = ex::run_bench(algs, grid, a.n, a.seed, src.table);
  Output o(a.out);
  std::ostream& os = o.stream();
  os << "# " << manifest("bench", a.seed, &src, {{"algorithms", a.algorithms}, {"grid", grid}, {"n", a.n}}).dump()
     << '\n';
  os << "algorithm,a,n,seconds,draws_per_second,proposals,accepted,acceptance,fast_path,density_checks,tail,"
        "fallback,checksum\n";
  for (const auto& r : rows) {
    const auto& c = r.counters;
    os << fmt::format("{},{},{},{:.6f},{:.6g},{},{},{:.6f},{},{},{},{},{:.17g}\n", r.algorithm, r.a, r.n, r.seconds,
                      r.throughput, c.proposals, c.accepted, c.acceptance(), c.fast_path, c.density_checks, c.tail,
                      c.fallback, r.checksum);
  }
  return 0;
}

// --- histogram -------------------------------------------------------------

struct HistogramArgs {
  std::string experiment = "fig3";
  int problems = 10000, proposals = 1000;
  std::uint64_t seed = 1;
  std::string out, table;
};

int cmd_histogram(const HistogramArgs& a) {
  TableSource src = open_table(a.table);
  const ex::Experiment e = a.experiment == "fig3" ? ex::Experiment::Fig3 : ex::Experiment::Fig4;
  const auto h = ex::run_histogram(e, a.problems, a.proposals, a.seed, src.table);
  const auto& sm = h.summary;
  const json summary = {{"problems", sm.problems}, {"proposals", sm.proposals}, {"min", sm.min}, {"q01", sm.q01},
                        {"q10", sm.q10},           {"median", sm.median},       {"sigma_hat", sm.sigma_hat}};
  {
    Output o(a.out);
    std::ostream& os = o.stream();
    os << "# "
       << manifest("histogram", a.seed, &src,
                   {{"experiment", a.experiment}, {"problems", a.problems}, {"proposals", a.proposals}})
              .dump()
       << '\n';
    os << "# summary " << summary.dump() << '\n';
    os << "index,rho,a1,b1,a2,b2,case,rate,accepted\n";
    for (const auto& r : h.rows) {
      const auto& p = r.params;
      os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g},{}\n", r.index, p.rho, p.a1, p.b1, p.a2,
                        p.b2, r.label, r.rate, r.accepted);
    }
  }
  std::ostream& log = a.out.empty() || a.out == "-" ? std::cerr : std::cout;
  log << fmt::format("{} problems x {} proposals: min {:.4f}, q01 {:.4f}, q10 {:.4f}, median {:.4f}, sigma_hat {:.4f}\n",
                     sm.problems, sm.proposals, sm.min, sm.q01, sm.q10, sm.median, sm.sigma_hat);
  return 0;
}

// --- validate --------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  std::string out, table;
};

int cmd_validate(const ValidateArgs& a) {
  TableSource src = open_table(a.table);
  std::vector<int> criteria;
  std::vector<std::string> names = a.suites;
  if (names.empty()) names = {"univariate", "bivariate", "multivariate", "bounds"};
  try {
    for (const auto& n : names)
      for (int k : ex::suite_criteria(ex::parse_suite(n))) criteria.push_back(k);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  // The stability check also counts non-finite values seen by the others.
  std::stable_partition(criteria.begin(), criteria.end(), [](int k) { return k != 13; });
  std::uint64_t nans = 0;
  bool ok = true;
  json checks = json::array();
  for (int k : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    ex::Check c = ex::run_criterion(k, src.table, a.seed, nans);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nans += c.nan_count;
    ok = ok && c.pass;
    json j = ex::to_json(c);
    j["seconds"] = secs;
    checks.push_back(j);
    std::cerr << fmt::format("{} {:>2} {}: {}\n", c.pass ? "PASS" : "FAIL", c.criterion, c.name, c.summary);
  }
  json report = {{"manifest", manifest("validate", a.seed, &src, {{"suites", names}})}, {"pass", ok}, {"checks", checks}};
  Output o(a.out);
  o.stream() << report.dump(2) << '\n';
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated Gaussian sampling toolkit"};
  app.set_version_flag("--version", ex::version_stamp());
  app.require_subcommand(1);

  GenTablesArgs gen;
  auto* g = app.add_subcommand("gen-tables", "Build a region table and write it to a file");
  g->add_option("--ns", gen.ns, "Target number of stored regions")->capture_default_str();
  g->add_option("--out", gen.out, "Output table file")->required();

  SampleArgs smp;
  auto* s = app.add_subcommand("sample", "Draw from a truncated Gaussian");
  s->add_option("--dist", smp.dist, "tn1, tn2-semi, tn2-box or tnd")
      ->required()
      ->check(CLI::IsMember({"tn1", "tn2-semi", "tn2-box", "tnd"}));
  s->add_option("--a", smp.a, "tn1 lower end");
  s->add_option("--b", smp.b, "tn1 upper end");
  s->add_option("--mu", smp.mu, "tn1 location")->capture_default_str();
  s->add_option("--sigma", smp.sigma, "tn1 scale")->capture_default_str();
  s->add_option("--rho", smp.rho, "Bivariate correlation");
  s->add_option("--a1", smp.a1, "Bivariate lower end of X1");
  s->add_option("--b1", smp.b1, "Bivariate upper end of X1 (tn2-box)");
  s->add_option("--a2", smp.a2, "Bivariate lower end of X2");
  s->add_option("--b2", smp.b2, "Bivariate upper end of X2 (tn2-box)");
  s->add_option("--cov", smp.cov, "tnd correlation matrix, row-major, comma separated")->delimiter(',');
  s->add_option("--lower", smp.lower, "tnd lower truncation points, comma separated")->delimiter(',');
  s->add_option("--n", smp.n, "Number of draws")->capture_default_str();
  s->add_option("--seed", smp.seed, "Master seed")->capture_default_str();
  s->add_option("--format", smp.format, "csv, bin or json")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "bin", "json"}));
  s->add_option("--out", smp.out, "Output file (default stdout)");
  s->add_option("--table", smp.table, "Table file (default $TGAUSS_TABLE or built in memory)");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Time the univariate samplers over a grid of a");
  b->add_option("--algorithms", bench.algorithms, "table, devroye, geweke-robert, inverse")->delimiter(',');
  b->add_option("--grid", bench.grid, "Explicit a values, comma separated")->delimiter(',');
  b->add_option("--from", bench.from, "Grid start")->capture_default_str();
  b->add_option("--to", bench.to, "Grid end")->capture_default_str();
  b->add_option("--step", bench.step, "Grid step")->capture_default_str();
  b->add_option("--n", bench.n, "Draws per grid point")->capture_default_str();
  b->add_option("--seed", bench.seed, "Master seed")->capture_default_str();
  b->add_option("--out", bench.out, "Output CSV (default stdout)");
  b->add_option("--table", bench.table, "Table file");

  HistogramArgs hist;
  auto* h = app.add_subcommand("histogram", "Acceptance-rate histogram experiment");
  h->add_option("--experiment", hist.experiment, "fig3 (semi-finite) or fig4 (finite box)")
      ->capture_default_str()
      ->check(CLI::IsMember({"fig3", "fig4"}));
  h->add_option("--problems", hist.problems, "Number of random problems")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  h->add_option("--proposals", hist.proposals, "Proposals per problem")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  h->add_option("--seed", hist.seed, "Master seed")->capture_default_str();
  h->add_option("--out", hist.out, "Output CSV (default stdout)");
  h->add_option("--table", hist.table, "Table file");

  ValidateArgs val;
  auto* v = app.add_subcommand("validate", "Run validation suites and emit a JSON report");
  v->add_option("--suite", val.suites, "univariate, bivariate, multivariate, bounds (default all)")->delimiter(',');
  v->add_option("--seed", val.seed, "Master seed")->capture_default_str();
  v->add_option("--out", val.out, "Output JSON (default stdout)");
  v->add_option("--table", val.table, "Table file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return cmd_gen_tables(gen);
    if (*s) return cmd_sample(smp);
    if (*b) return cmd_bench(bench);
    if (*h) return cmd_histogram(hist);
    if (*v) return cmd_validate(val);
  } catch (const UsageError& e) {
    std::cerr << "tgauss: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "tgauss: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
