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

#include "tgauss/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tgauss/normal.hpp"

namespace tgauss {
namespace {

constexpr double kNaiveMinMass = 1e-6;

inline void count_proposal(BranchCounters* c) {
  if (c) ++c->proposals;
}

inline double accept(double x, BranchCounters* c) {
  if (c) ++c->accepted;
  return x;
}

// Exponential rejection on [a, b] with rate a (b > 0) or b (b <= 0); the rate
// lies inside [a, b], where exp(-(x - rate)^2 / 2) is the exact ratio bound.
double exponential_rejection(double a, double b, RandomStream& s, BranchCounters* c) {
  const double rate = b > 0.0 ? a : b;
  while (true) {
    count_proposal(c);
    const double x = trunc_exp(a, b, rate, s);
    const double g = x - rate;
    if (s.exponential(1.0) >= 0.5 * g * g) return accept(x, c);
  }
}

// Index of the region holding b: the largest i with x_i <= b, or N beyond x_N.
int upper_region(double b, const RegionTable& t) {
  if (b <= t.a_max) return t.region_of(b);
  if (b >= t.right_edge()) return t.N;
  const auto it = std::upper_bound(t.edges.begin(), t.edges.end(), b);
  return static_cast<int>(it - t.edges.begin()) - 1;
}

}  // namespace

BranchCounters& BranchCounters::operator+=(const BranchCounters& o) {
  proposals += o.proposals;
  accepted += o.accepted;
  fast_path += o.fast_path;
  density_checks += o.density_checks;
  tail += o.tail;
  fallback += o.fallback;
  return *this;
}

double inverse_transform(double a, double u) {
  if (!(u > 0.0 && u <= 1.0)) throw std::domain_error("inverse_transform: u must lie in (0, 1]");
  const double p = Phi(-a) * u;
  if (!(p > 0.0)) throw std::overflow_error("inverse_transform: Phi(-a) u underflows");
  const double x = -Phi_inv(p);
  if (!std::isfinite(x)) throw std::overflow_error("inverse_transform: non-finite result");
  return std::max(x, a);
}

double inverse_transform_sample(double a, RandomStream& s) { return inverse_transform(a, s.uniform_pos()); }

double devroye(double a, RandomStream& s, BranchCounters* c) {
  while (true) {
    count_proposal(c);
    const double e = s.exponential(1.0) / a;
    if (s.exponential(1.0) >= 0.5 * e * e) return accept(a + e, c);
  }
}

double geweke_robert(double a, RandomStream& s, BranchCounters* c) {
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  while (true) {
    count_proposal(c);
    const double x = a + s.exponential(1.0) / rate;
    const double g = x - rate;
    if (s.exponential(1.0) >= 0.5 * g * g) return accept(x, c);
  }
}

double naive(double a, double b, RandomStream& s, BranchCounters* c) {
  if (!(a < b)) throw std::invalid_argument("naive: requires a < b");
  if (Phi_diff(a, b) < kNaiveMinMass) throw std::domain_error("naive: interval mass below 1e-6");
  while (true) {
    count_proposal(c);
    const double x = s.normal();
    if (x >= a && x <= b) return accept(x, c);
  }
}

double trunc_exp(double a, double b, double rate, RandomStream& s) {
  if (!(a < b)) throw std::invalid_argument("trunc_exp: requires a < b");
  const double w = b - a;
  const double u = s.uniform();
  if (std::abs(rate * w) < 1e-12) return a + w * u;
  const double r = std::abs(rate);
  const double z = -std::log1p(u * std::expm1(-r * w)) / r;  // in [0, w]
  const double x = rate > 0.0 ? a + z : b - z;
  return std::clamp(x, a, b);
}

double devroye_composite(double a, const SamplerConfig& cfg, RandomStream& s, BranchCounters* c) {
  return a < cfg.a0 ? naive(a, kInf, s, c) : devroye(a, s, c);
}

double geweke_robert_composite(double a, RandomStream& s, BranchCounters* c) {
  return a < 0.0 ? naive(a, kInf, s, c) : geweke_robert(a, s, c);
}

double sample_lower(double a, const RegionTable& t, RandomStream& s, BranchCounters* c) {
  if (a < t.a_min) {
    if (c) ++c->fallback;
    return naive(a, kInf, s, c);
  }
  if (a > t.a_max) {
    if (c) ++c->fallback;
    return devroye(a, s, c);
  }
  const int N = t.N;
  const int i_a = t.region_of(a);
  const int base = t.i_lo;
  while (true) {
    count_proposal(c);
    const int i = static_cast<int>(s.uniform_int(i_a, N));
    if (i == N) {
      if (c) ++c->tail;
      return accept(devroye(t.right_edge(), s), c);
    }
    const int n = i - base;
    if (i <= i_a + 1) {
      const double x = t.x[n] + t.d[n] * s.uniform();
      if (x < a) continue;
      const double y = t.y[n] * s.uniform();
      if (y <= t.y_low[n]) return accept(x, c);
      if (c) ++c->density_checks;
      if (y <= phi(x)) return accept(x, c);
    } else {
      const double u = s.uniform();
      if (u * t.y[n] <= t.y_low[n]) {
        if (c) ++c->fast_path;
        return accept(t.x[n] + t.delta[n] * u, c);
      }
      if (c) ++c->density_checks;
      const double x = t.x[n] + t.d[n] * s.uniform();
      if (u * t.y[n] <= phi(x)) return accept(x, c);
    }
  }
}

double sample_interval(double a, double b, const RegionTable& t, const SamplerConfig& cfg, RandomStream& s,
                       BranchCounters* c) {
  if (!(a < b)) throw std::invalid_argument("sample_interval: requires a < b");
  if (b == kInf) return sample_lower(a, t, s, c);
  if (a < t.a_min) {
    if (-b >= t.a_min) return -sample_interval(-b, -a, t, cfg, s, c);
    // Here a < -2 < 2 < b, so the interval carries at least 95% of the mass.
    if (c) ++c->fallback;
    return naive(a, b, s, c);
  }
  if (a > t.a_max) {
    if (c) ++c->fallback;
    return exponential_rejection(a, b, s, c);
  }
  const int i_a = t.region_of(a);
  const int i_b = upper_region(b, t);
  if (i_b - i_a <= cfg.k_min) {
    if (c) ++c->fallback;
    return exponential_rejection(a, b, s, c);
  }
  const int N = t.N;
  const int base = t.i_lo;
  while (true) {
    count_proposal(c);
    const int i = static_cast<int>(s.uniform_int(i_a, i_b));
    if (i == N) {
      if (c) ++c->tail;
      const double x = devroye(t.right_edge(), s);
      if (x <= b) return accept(x, c);
      continue;
    }
    const int n = i - base;
    if (i <= i_a + 1 || i >= i_b - 1) {
      const double x = t.x[n] + t.d[n] * s.uniform();
      if (x < a || x > b) continue;
      const double y = t.y[n] * s.uniform();
      if (y <= t.y_low[n]) return accept(x, c);
      if (c) ++c->density_checks;
      if (y <= phi(x)) return accept(x, c);
    } else {
      const double u = s.uniform();
      if (u * t.y[n] <= t.y_low[n]) {
        if (c) ++c->fast_path;
        return accept(t.x[n] + t.delta[n] * u, c);
      }
      if (c) ++c->density_checks;
      const double x = t.x[n] + t.d[n] * s.uniform();
      if (u * t.y[n] <= phi(x)) return accept(x, c);
    }
  }
}

double sample_general(const UnivariateSpec& spec, const RegionTable& t, const SamplerConfig& cfg, RandomStream& s,
                      BranchCounters* c) {
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma) || !std::isfinite(spec.mu))
    throw std::invalid_argument("sample_general: sigma must be positive and finite");
  if (!(spec.a < spec.b)) throw std::invalid_argument("sample_general: requires a < b");
  const double a = (spec.a - spec.mu) / spec.sigma;
  const double b = (spec.b - spec.mu) / spec.sigma;
  double z;
  if (a == -kInf && b == kInf) {
    z = s.normal();
  } else if (a == -kInf) {
    z = -sample_lower(-b, t, s, c);
  } else {
    z = sample_interval(a, b, t, cfg, s, c);
  }
  return std::clamp(spec.mu + spec.sigma * z, spec.a, spec.b);
}

}  // namespace tgauss
