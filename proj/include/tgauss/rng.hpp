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

// Seeded uniform randomness shared by every sampler in the library.

#pragma once

#include <cstdint>
#include <limits>

namespace tgauss {

/// Name recorded in run manifests.
inline constexpr const char* kGeneratorName = "xoshiro256**";

/// SplitMix64 step; used for seeding and for deriving worker seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for worker `index` under master seed `master`. Distinct indices give
/// decorrelated xoshiro states.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// xoshiro256** generator with a 64-bit seed. Single owner: use one stream
/// per worker and derive worker seeds with derive_seed().
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0x5eed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }

  result_type next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  /// Exactly uniform integer in [lo, hi]. Throws std::invalid_argument if lo > hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Exp(rate) by inversion. Throws std::invalid_argument if rate <= 0.
  double exponential(double rate);

  /// Standard normal draw (Marsaglia polar method, spare value cached).
  double normal();

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t bounded(std::uint64_t range);  // uniform in [0, range)

  std::uint64_t s_[4];
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Inversion map behind RandomStream::exponential: -log(1 - u) / rate.
double exponential_from_uniform(double u, double rate);

}  // namespace tgauss
