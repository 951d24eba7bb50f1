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

#include "tgauss/tables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "tgauss/normal.hpp"

namespace tgauss {
namespace {

constexpr char kMagic[8] = {'T', 'G', 'T', 'A', 'B', 'L', 'E', '\0'};
constexpr double kEdgeLimit = 40.0;

// Right edge x_N reached by the outward recursion x_{i+1} = x_i + v/phi(x_i);
// +inf once the recursion runs past the representable tail.
double outward_right_edge(int N, double v, std::vector<double>* edges) {
  double x = 0.0;
  if (edges) edges->assign(1, 0.0);
  for (int i = 0; i < N; ++i) {
    x += v / phi(x);
    if (!(x < kEdgeLimit)) return std::numeric_limits<double>::infinity();
    if (edges) edges->push_back(x);
  }
  return x;
}

// Positive when the tail beyond x_N(v) holds more than v.
double closure_gap(int N, double v) {
  const double r = outward_right_edge(N, v, nullptr);
  if (std::isinf(r)) return -v;
  return Phi(-r) - v;
}

void fill_hot_arrays(RegionTable& t) {
  const int count = t.N - t.i_lo;
  t.x.resize(count + 1);
  t.y.resize(count);
  t.y_low.resize(count);
  t.d.resize(count);
  t.delta.resize(count);
  for (int n = 0; n <= count; ++n) t.x[n] = t.edge(t.i_lo + n);
  for (int n = 0; n < count; ++n) {
    const int i = t.i_lo + n;
    const double lo = t.x[n];
    const double hi = t.x[n + 1];
    const double f_lo = phi(lo);
    const double f_hi = phi(hi);
    t.d[n] = hi - lo;
    t.y[n] = i >= 0 ? f_lo : f_hi;
    t.y_low[n] = i >= 0 ? f_hi : f_lo;
    t.delta[n] = t.d[n] * t.y[n] / t.y_low[n];
  }
}

// Largest i in [-N, N] with x_i <= z.
int last_edge_at_or_below(const RegionTable& t, double z) {
  if (z >= 0.0) {
    auto it = std::upper_bound(t.edges.begin(), t.edges.end(), z);
    return static_cast<int>(std::distance(t.edges.begin(), it)) - 1;
  }
  // x_{-m} <= z  <=>  edges[m] >= -z; want the smallest such m.
  auto it = std::lower_bound(t.edges.begin(), t.edges.end(), -z);
  return -static_cast<int>(std::distance(t.edges.begin(), it));
}

std::int64_t floor_index(double a, double h) {
  return static_cast<std::int64_t>(std::floor(a / h));
}

// Byte writer / reader with explicit little-endian layout.
class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  template <class T>
  void scalar(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t k = 0; k < sizeof(T); ++k) buf_.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
  }
  template <class T>
  void sequence(const std::vector<T>& v) {
    scalar(static_cast<std::uint32_t>(v.size()));
    for (const T& e : v) scalar(e);
  }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(const std::uint8_t* p, std::size_t n) : p_(p), n_(n) {}
  template <class T>
  T scalar() {
    need(sizeof(T));
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k) bits |= static_cast<U>(p_[pos_ + k]) << (8 * k);
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }
  template <class T>
  std::vector<T> sequence() {
    const auto len = scalar<std::uint32_t>();
    need(static_cast<std::size_t>(len) * sizeof(T));
    std::vector<T> v(len);
    for (auto& e : v) e = scalar<T>();
    return v;
  }
  void bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, p_ + pos_, n);
    pos_ += n;
  }
  std::size_t remaining() const { return n_ - pos_; }

 private:
  void need(std::size_t n) const {
    if (n_ - pos_ < n) throw TableError("table file truncated");
  }
  const std::uint8_t* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

std::uint64_t fnv1a(const std::uint8_t* p, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t k = 0; k < n; ++k) {
    h ^= p[k];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void check(bool ok, const std::string& what) {
  if (!ok) throw TableError("table invariant violated: " + what);
}

}  // namespace

int RegionTable::index_lookup(double a) const {
  return j[static_cast<std::size_t>(floor_index(a, h) - k_lo)];
}

int RegionTable::region_of(double a) const {
  std::int64_t k = floor_index(a, h) - k_lo;
  k = std::clamp<std::int64_t>(k, 0, static_cast<std::int64_t>(j.size()) - 1);
  int n = j[static_cast<std::size_t>(k)] - i_lo;
  const int last = static_cast<int>(x.size()) - 2;
  while (n < last && x[n + 1] <= a) ++n;
  while (n > 0 && x[n] > a) --n;
  return i_lo + n;
}

std::size_t RegionTable::memory_bytes() const {
  return (x.size() + y.size() + y_low.size() + d.size() + delta.size()) * sizeof(double) +
         j.size() * sizeof(std::int32_t);
}

RegionTable build_regions(int N) {
  if (N < 8) throw TableError(fmt::format("build_regions needs N >= 8, got {}", N));
  // Total area (2N+2) v must exceed one, and a too-wide v overshoots the tail.
  double lo = 0.5 / (2.0 * N + 2.0);
  double hi = 2.0 / (2.0 * N + 2.0);
  if (!(closure_gap(N, lo) > 0.0 && closure_gap(N, hi) < 0.0))
    throw TableError("closure bisection failed to bracket the region area");
  int iter = 0;
  for (; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (closure_gap(N, mid) > 0.0 ? lo : hi) = mid;
  }
  if (iter == 200) throw TableError("closure bisection did not converge");
  // Pick the endpoint with the smaller closure residual.
  const double v = std::abs(closure_gap(N, lo)) <= std::abs(closure_gap(N, hi)) ? lo : hi;

  RegionTable t;
  t.N = N;
  t.v = v;
  outward_right_edge(N, v, &t.edges);
  const double residual = std::abs(Phi(-t.edges.back()) - v) / v;
  if (!(residual <= 1e-12))
    throw TableError(fmt::format("tail closure residual {:.3g} exceeds 1e-12", residual));
  return t;
}

RegionTable build_index(RegionTable t, double a_min, double a_max) {
  if (t.edges.empty()) throw TableError("build_index needs a region decomposition");
  if (!(a_min >= -t.right_edge() && a_max <= t.right_edge() && a_min < 0.0 && a_max > 0.0))
    throw TableError(fmt::format("index window [{}, {}] outside [-x_N, x_N]", a_min, a_max));
  t.a_min = a_min;
  t.a_max = a_max;
  t.h = t.edges[1] - t.edges[0];
  t.k_lo = floor_index(a_min, t.h);
  const std::int64_t k_hi = floor_index(a_max, t.h);
  t.j.clear();
  t.j.reserve(static_cast<std::size_t>(k_hi - t.k_lo + 1));
  for (std::int64_t k = t.k_lo; k <= k_hi; ++k)
    t.j.push_back(last_edge_at_or_below(t, static_cast<double>(k) * t.h));
  // Sampling from a in the window can draw any region up to N, so every
  // rectangle from the lowest indexed one through N-1 is stored.
  t.i_lo = std::max(t.j.front(), -t.N);
  fill_hot_arrays(t);
  return t;
}

RegionTable build_table(int N) {
  if (N <= kDefaultAMaxOffset)
    throw TableError(fmt::format("default window needs N > {}, got {}", kDefaultAMaxOffset, N));
  RegionTable t = build_regions(N);
  const double a_max = t.edges[N - kDefaultAMaxOffset];
  return build_index(std::move(t), kDefaultAMin, a_max);
}

RegionTable build_table_for_stored(int stored_target) {
  if (stored_target < 64) throw TableError("stored_target must be at least 64");
  // N_s grows monotonically with N and is close to 2N; search upward from an
  // underestimate.
  int N = std::max(kDefaultAMaxOffset + 1, stored_target / 2 - 64);
  while (true) {
    RegionTable t = build_table(N);
    if (t.stored_count() >= stored_target) return t;
    N += std::max(1, (stored_target - t.stored_count()) / 3);
  }
}

void validate_table(const RegionTable& t) {
  check(t.N >= 8, "N >= 8");
  check(static_cast<int>(t.edges.size()) == t.N + 1, "edge count");
  check(t.edges[0] == 0.0, "x_0 = 0");
  check(t.v > 0.0 && std::isfinite(t.v), "positive area");
  for (int i = 0; i < t.N; ++i) {
    const double lo = t.edges[i], hi = t.edges[i + 1];
    check(hi > lo, fmt::format("edges increasing at {}", i));
    const double area = (hi - lo) * phi(lo);
    check(std::abs(area - t.v) <= 1e-12 * t.v, fmt::format("equal area at rectangle {}", i));
  }
  check(std::abs(Phi(-t.right_edge()) - t.v) <= 1e-12 * t.v, "tail closure");
  check(t.h > 0.0 && t.h == t.edges[1] - t.edges[0], "h = x_1 - x_0");
  check(t.a_min < 0.0 && t.a_max > 0.0, "a_min < 0 < a_max");
  check(t.a_min >= -t.right_edge() && t.a_max <= t.right_edge(), "window inside [-x_N, x_N]");
  check(t.k_lo == floor_index(t.a_min, t.h), "k_lo");
  check(static_cast<std::int64_t>(t.j.size()) == floor_index(t.a_max, t.h) - t.k_lo + 1, "index length");
  for (std::size_t n = 0; n < t.j.size(); ++n) {
    const double kh = static_cast<double>(t.k_lo + static_cast<std::int64_t>(n)) * t.h;
    const int jk = t.j[n];
    check(jk >= -t.N && jk <= t.N, "index range");
    check(t.edge(jk) <= kh && (jk == t.N || t.edge(jk + 1) > kh), fmt::format("index bracketing at k={}", n));
  }
  check(t.i_lo == std::max(t.j.front(), -t.N), "i_lo");
  const int count = t.N - t.i_lo;
  check(static_cast<int>(t.x.size()) == count + 1 && static_cast<int>(t.y.size()) == count &&
            static_cast<int>(t.y_low.size()) == count && static_cast<int>(t.d.size()) == count &&
            static_cast<int>(t.delta.size()) == count,
        "stored array lengths");
  double min_d = std::numeric_limits<double>::infinity();
  for (int n = 0; n < count; ++n) {
    const int i = t.i_lo + n;
    check(t.x[n] == t.edge(i), fmt::format("stored edge {}", i));
    check(t.d[n] == t.x[n + 1] - t.x[n], fmt::format("width {}", i));
    check(t.y_low[n] <= t.y[n], fmt::format("y_low <= y at {}", i));
    check(t.delta[n] >= t.d[n], fmt::format("delta >= d at {}", i));
    check(std::abs(t.d[n] * t.y[n] - t.v) <= 1e-12 * t.v, fmt::format("stored area {}", i));
    check(t.cumulative_area(i) >= Phi(t.x[n + 1]), fmt::format("A(i) >= Phi(x_(i+1)) at {}", i));
    min_d = std::min(min_d, t.d[n]);
  }
  check(t.x[count] == t.right_edge(), "trailing edge");
  check(t.h <= min_d, "h <= min d");
}

std::vector<std::uint8_t> serialize_table(const RegionTable& t) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.scalar(kTableFormatVersion);
  w.scalar(static_cast<std::int32_t>(t.N));
  w.scalar(static_cast<std::int32_t>(t.stored_count()));
  w.scalar(static_cast<std::int32_t>(t.i_lo));
  w.scalar(t.k_lo);
  w.scalar(t.a_min);
  w.scalar(t.a_max);
  w.scalar(t.h);
  w.scalar(t.v);
  w.sequence(t.x);
  w.sequence(t.y);
  w.sequence(t.y_low);
  w.sequence(t.d);
  w.sequence(t.delta);
  w.sequence(t.j);
  w.sequence(t.edges);
  auto& buf = w.buffer();
  const std::uint64_t sum = fnv1a(buf.data(), buf.size());
  w.scalar(sum);
  return buf;
}

RegionTable deserialize_table(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kMagic) + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw TableError("not a table file (bad magic)");
  const std::size_t body = bytes.size() - 8;
  Reader tail(bytes.data() + body, 8);
  if (tail.scalar<std::uint64_t>() != fnv1a(bytes.data(), body))
    throw TableError("table checksum mismatch (file truncated or corrupted)");

  Reader r(bytes.data(), body);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  const auto version = r.scalar<std::uint32_t>();
  if (version != kTableFormatVersion)
    throw TableError(fmt::format("table format version {} unsupported (expected {})", version,
                                 kTableFormatVersion));
  RegionTable t;
  t.N = r.scalar<std::int32_t>();
  const int stored = r.scalar<std::int32_t>();
  t.i_lo = r.scalar<std::int32_t>();
  t.k_lo = r.scalar<std::int64_t>();
  t.a_min = r.scalar<double>();
  t.a_max = r.scalar<double>();
  t.h = r.scalar<double>();
  t.v = r.scalar<double>();
  t.x = r.sequence<double>();
  t.y = r.sequence<double>();
  t.y_low = r.sequence<double>();
  t.d = r.sequence<double>();
  t.delta = r.sequence<double>();
  t.j = r.sequence<std::int32_t>();
  t.edges = r.sequence<double>();
  if (r.remaining() != 0) throw TableError("trailing bytes in table file");
  if (stored != t.stored_count()) throw TableError("stored count does not match header");
  validate_table(t);
  return t;
}

void save_table(const RegionTable& table, const std::filesystem::path& path) {
  const auto bytes = serialize_table(table);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TableError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw TableError("write failed for " + path.string());
}

RegionTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TableError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_table(bytes);
}

std::string table_to_json(const RegionTable& t) {
  std::ostringstream os;
  auto reals = [&os](const char* name, const std::vector<double>& v) {
    os << "  \"" << name << "\": [";
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << fmt::format("{:.17g}", v[k]);
    os << "]";
  };
  os << "{\n  \"format\": \"tgauss-region-table\",\n";
  os << "  \"version\": " << kTableFormatVersion << ",\n";
  os << "  \"N\": " << t.N << ",\n  \"N_s\": " << t.stored_count() << ",\n";
  os << "  \"i_lo\": " << t.i_lo << ",\n  \"k_lo\": " << t.k_lo << ",\n";
  os << fmt::format("  \"a_min\": {:.17g},\n  \"a_max\": {:.17g},\n  \"h\": {:.17g},\n  \"v\": {:.17g},\n",
                    t.a_min, t.a_max, t.h, t.v);
  reals("x", t.x);
  os << ",\n";
  reals("y", t.y);
  os << ",\n";
  reals("y_low", t.y_low);
  os << ",\n";
  reals("d", t.d);
  os << ",\n";
  reals("delta", t.delta);
  os << ",\n  \"j\": [";
  for (std::size_t k = 0; k < t.j.size(); ++k) os << (k ? "," : "") << t.j[k];
  os << "],\n";
  reals("edges", t.edges);
  os << "\n}\n";
  return os.str();
}

}  // namespace tgauss
