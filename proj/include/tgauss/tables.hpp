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

// Equal-area region decomposition of the standard normal density and the
// lookup table that maps a truncation point to its region.
//
// Regions are numbered -N-1..N. Regions -N..N-1 are vertical rectangles
// [x_i, x_{i+1}] of common area v; regions -N-1 and N are the Gaussian tails
// beyond -x_N and x_N, each of mass v.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace tgauss {

class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RegionTable {
  int N = 0;         // rectangles on each side of zero
  double v = 0.0;    // common region area
  std::vector<double> edges;  // x_0..x_N; x_{-i} = -x_i

  // Index window and lookup table.
  double a_min = 0.0;
  double a_max = 0.0;
  double h = 0.0;
  std::int64_t k_lo = 0;          // j[0] corresponds to k = k_lo
  std::vector<std::int32_t> j;    // j_k = max{i : x_i <= k h}

  // Hot arrays for stored rectangles i = i_lo..N-1; entry n is rectangle i_lo + n.
  int i_lo = 0;
  std::vector<double> x;      // x_{i_lo}..x_N (one extra trailing edge)
  std::vector<double> y;      // max(phi(x_i), phi(x_{i+1}))
  std::vector<double> y_low;  // min(phi(x_i), phi(x_{i+1}))
  std::vector<double> d;      // x_{i+1} - x_i
  std::vector<double> delta;  // d_i y_i / y_low_i

  /// N_s, the number of stored rectangles.
  int stored_count() const { return static_cast<int>(y.size()); }

  /// Edge x_i for any i in [-N, N].
  double edge(int i) const { return i >= 0 ? edges[i] : -edges[-i]; }

  double right_edge() const { return edges.back(); }

  /// Total area of regions -N-1..i; an upper bound for Phi(x_{i+1}).
  double cumulative_area(int i) const { return static_cast<double>(i + N + 2) * v; }

  /// j_{floor(a/h)} as stored. For a in [a_min, a_max] the region holding a
  /// is the result or the result + 1.
  int index_lookup(double a) const;

  /// Exact index l with x_l <= a < x_{l+1}, for a in [a_min, x_N).
  int region_of(double a) const;

  /// Bytes held by the five real hot arrays and the integer index table.
  std::size_t memory_bytes() const;

  bool operator==(const RegionTable&) const = default;
};

inline constexpr double kDefaultAMin = -2.0;
inline constexpr int kDefaultAMaxOffset = 20;  // a_max = x_{N-20}
inline constexpr int kDefaultStoredTarget = 4000;

/// Equal-area decomposition with N rectangles per side (N >= 8). The area v
/// is found by bisection so the tail beyond x_N also has mass v.
/// Throws TableError if the bisection fails.
RegionTable build_regions(int N);

/// Fills the index table and hot arrays for the window [a_min, a_max], with
/// h = x_1 - x_0. Throws TableError if the window exceeds [-x_N, x_N].
RegionTable build_index(RegionTable table, double a_min, double a_max);

/// build_regions + build_index with a_min = -2 and a_max = x_{N-20}.
RegionTable build_table(int N);

/// Smallest N whose default table stores at least `stored_target` rectangles.
RegionTable build_table_for_stored(int stored_target);

/// Checks every structural invariant; throws TableError naming the first
/// violation.
void validate_table(const RegionTable& table);

void save_table(const RegionTable& table, const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_table(const RegionTable& table);

/// Throws TableError on bad magic, version, length, checksum or invariants.
RegionTable load_table(const std::filesystem::path& path);
RegionTable deserialize_table(const std::vector<std::uint8_t>& bytes);

/// JSON export with 17 significant digits per real.
std::string table_to_json(const RegionTable& table);

inline constexpr std::uint32_t kTableFormatVersion = 1;

}  // namespace tgauss
