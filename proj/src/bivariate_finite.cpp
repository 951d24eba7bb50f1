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

#include "tgauss/bivariate_finite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tgauss/normal.hpp"

namespace tgauss {
namespace {

constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;
const double kLogSqrtHalfPi = std::log(kSqrtHalfPi);
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of the integral of exp(c + k t) over t in [0, W].
double log_exp_integral(double c, double k, double W) {
  if (!(W > 0.0)) return kNegInf;
  const double t = k * W;
  if (std::abs(t) < 1e-10) return c + std::log(W) + 0.5 * t;
  if (t > 0.0) return c + t + std::log(-std::expm1(-t)) - std::log(k);
  return c + std::log(-std::expm1(t)) - std::log(-k);
}

// Index drawn from unnormalised log weights.
int pick(const double* log_w, int n, double u) {
  double top = kNegInf;
  for (int k = 0; k < n; ++k) top = std::max(top, log_w[k]);
  double total = 0.0;
  double w[3];
  for (int k = 0; k < n; ++k) total += (w[k] = std::exp(log_w[k] - top));
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    acc += w[k] / total;
    if (u < acc && w[k] > 0.0) return k;
  }
  for (int k = n - 1; k >= 0; --k)
    if (w[k] > 0.0) return k;
  return 0;
}

}  // namespace

std::string_view to_string(FiniteCase c) { return c == FiniteCase::M3 ? "M3" : "T"; }

std::pair<double, double> FiniteTransform::to_original(double y1, double y2) const {
  if (negate) y1 = -y1, y2 = -y2;
  if (swap) std::swap(y1, y2);
  if (flip2) y2 = -y2;
  return {y1, y2};
}

std::vector<FiniteProblem> orientations(double rho, double a1, double b1, double a2, double b2) {
  for (double v : {rho, a1, b1, a2, b2})
    if (!std::isfinite(v)) throw std::invalid_argument("finite problem: parameters must be finite");
  if (!(a1 < b1 && a2 < b2)) throw std::invalid_argument("finite problem: empty box (need a1 < b1 and a2 < b2)");
  if (!(std::abs(rho) < 1.0 - 1e-12)) throw std::invalid_argument("finite problem: |rho| must be below 1 - 1e-12");
  FiniteProblem base;
  base.transform.flip2 = rho < 0.0;
  if (base.transform.flip2) {
    rho = -rho;
    std::swap(a2, b2);
    a2 = -a2, b2 = -b2;
  }
  base.rho = rho;
  base.nu2 = (1.0 - rho) * (1.0 + rho);
  base.nu = std::sqrt(base.nu2);
  std::vector<FiniteProblem> out;
  out.reserve(4);
  for (int sw = 0; sw < 2; ++sw) {
    for (int ng = 0; ng < 2; ++ng) {
      double A1 = a1, B1 = b1, A2 = a2, B2 = b2;
      if (sw) std::swap(A1, A2), std::swap(B1, B2);
      if (ng) {
        std::swap(A1, B1), std::swap(A2, B2);
        A1 = -A1, B1 = -B1, A2 = -A2, B2 = -B2;
      }
      FiniteProblem q = base;
      q.a1 = A1, q.b1 = B1, q.a2 = A2, q.b2 = B2;
      q.transform.swap = sw, q.transform.negate = ng;
      out.push_back(q);
    }
  }
  return out;
}

bool is_canonical(const FiniteProblem& p) { return p.b2 >= 0.0 && (p.a2 >= p.a1 || p.b1 <= 0.0); }

FiniteProblem canonicalize(double rho, double a1, double b1, double a2, double b2) {
  const auto all = orientations(rho, a1, b1, a2, b2);
  for (const auto& q : all)
    if (is_canonical(q)) return q;
  for (const auto& q : all)
    if (q.b2 >= 0.0) return q;
  return all.front();
}

FiniteGeometry make_geometry(const FiniteProblem& p) {
  FiniteGeometry g;
  g.alpha = p.rho / p.nu;
  g.beta1 = -p.a2 / p.nu;
  g.beta0 = -p.b2 / p.nu;
  g.gamma1 = p.rho > 0.0 ? p.a2 / p.rho : -kInf;
  g.gamma0 = p.rho > 0.0 ? p.b2 / p.rho : kInf;
  g.upsilon = 0.5 * (g.beta1 - g.beta0);
  return g;
}

double log_kappa(double x1, const FiniteGeometry& g) {
  return log_Phi_diff(g.alpha * x1 + g.beta0, g.alpha * x1 + g.beta1);
}

double kappa(double x1, const FiniteGeometry& g) { return std::exp(log_kappa(x1, g)); }

double xi(double x1, const FiniteGeometry& g) { return log_phi(x1) + log_kappa(x1, g); }

double xi_prime(double x1, const FiniteGeometry& g) {
  const double z1 = g.alpha * x1 + g.beta1;
  const double z0 = g.alpha * x1 + g.beta0;
  const double lk = log_Phi_diff(z0, z1);
  return -x1 + g.alpha * (std::exp(log_phi(z1) - lk) - std::exp(log_phi(z0) - lk));
}

FiniteCase classify_finite(const FiniteGeometry& g, double delta) {
  return g.beta1 - g.beta0 < delta ? FiniteCase::T : FiniteCase::M3;
}

M3Weights m3_weights(const FiniteProblem& p, const FiniteGeometry& g, LeftWeightRule rule) {
  M3Weights m;
  m.log_zeta = {kNegInf, kNegInf, kNegInf};
  const double nu = p.nu, rho = p.rho;
  if (g.gamma1 > p.a1) {
    m.left_hi = std::min(g.gamma1, p.b1);
    const double x0 = std::min(0.0, g.alpha * p.a1 + g.beta1);
    const double d = d_fun(x0);
    const double m_t = rho * (p.a2 + kTilt * nu);
    const double log_tilted = std::log(nu) + std::log(d) - kLogSqrt2Pi +
                              (m_t * m_t - p.a2 * p.a2 - 2.0 * kTilt * nu * p.a2) / (2.0 * p.nu2) +
                              log_Phi_diff((p.a1 - m_t) / nu, (m.left_hi - m_t) / nu);
    const double m_u = rho * p.a2;
    const double log_untilted =
        std::log(0.5 * nu) - 0.5 * p.a2 * p.a2 + log_Phi_diff((p.a1 - m_u) / nu, (m.left_hi - m_u) / nu);
    switch (rule) {
      case LeftWeightRule::Literal: m.left_tilted = std::max(p.b1, g.gamma1) > 0.0; break;
      case LeftWeightRule::ArgumentRange: m.left_tilted = g.alpha * m.left_hi + g.beta1 > -kChiDoubling; break;
      case LeftWeightRule::TighterWeight: m.left_tilted = log_tilted < log_untilted; break;
    }
    m.d_left = d;
    m.m_left = m.left_tilted ? m_t : m_u;
    m.log_zeta[0] = m.left_tilted ? log_tilted : log_untilted;
  }
  if (p.b1 > g.gamma1 && p.a1 < g.gamma0) {
    m.centre_lo = std::max(g.gamma1, p.a1);
    m.centre_hi = std::min(g.gamma0, p.b1);
    m.log_zeta[1] = log_Phi_diff(-g.upsilon, g.upsilon) + log_Phi_diff(m.centre_lo, m.centre_hi);
  }
  if (p.b1 > g.gamma0) {
    m.right_lo = std::max(g.gamma0, p.a1);
    const double m_r = rho * p.b2;
    m.log_zeta[2] =
        std::log(0.5 * nu) - 0.5 * p.b2 * p.b2 + log_Phi_diff((m.right_lo - m_r) / nu, (p.b1 - m_r) / nu);
  }
  m.zeta_l = std::exp(m.log_zeta[0]);
  m.zeta_c = std::exp(m.log_zeta[1]);
  m.zeta_r = std::exp(m.log_zeta[2]);
  return m;
}

double TangentEnvelope::log_value(double x) const {
  if (count == 1 || x <= cross) return xi_v + slope_v * (x - v);
  return xi_w + slope_w * (x - w);
}

TangentEnvelope build_tangent_envelope(const FiniteProblem& p, const FiniteGeometry& g) {
  const double a = p.a1, b = p.b1;
  const double m = -g.alpha * (g.beta0 + g.beta1) / (2.0 * (1.0 + g.alpha * g.alpha));
  const double s = 1.0 / std::sqrt(1.0 + g.alpha * g.alpha);
  TangentEnvelope e;
  auto single = [&](double at) {
    e.count = 1;
    e.v = e.w = std::clamp(at, a, b);
    e.xi_v = e.xi_w = xi(e.v, g);
    e.slope_v = e.slope_w = xi_prime(e.v, g);
    e.cross = b;
  };
  if (a >= m) {
    single(std::max(m + s, a));
  } else if (b <= m) {
    single(std::min(m - s, b));
  } else {
    const double v = std::max(a, m - s), w = std::min(b, m + s);
    if (w - v < s) {
      single(0.5 * (v + w));
    } else {
      e.count = 2;
      e.v = v, e.w = w;
      e.xi_v = xi(v, g), e.xi_w = xi(w, g);
      e.slope_v = xi_prime(v, g), e.slope_w = xi_prime(w, g);
      const double gap = e.slope_v - e.slope_w;
      if (!(gap > 1e-12 * (1.0 + std::abs(e.slope_v)))) {
        single(0.5 * (v + w));
      } else {
        e.cross = std::clamp((e.xi_w - e.xi_v + e.slope_v * v - e.slope_w * w) / gap, v, w);
      }
    }
  }
  e.log_mass[0] = log_exp_integral(e.xi_v + e.slope_v * (a - e.v), e.slope_v, e.cross - a);
  e.log_mass[1] = e.count == 2 ? log_exp_integral(e.xi_w + e.slope_w * (e.cross - e.w), e.slope_w, b - e.cross)
                               : kNegInf;
  return e;
}

FiniteSampler::FiniteSampler(double rho, double a1, double b1, double a2, double b2, const RegionTable& table,
                             FiniteConfig cfg)
    : table_(&table), cfg_(cfg) {
  if (cfg_.orientation == OrientationRule::FirstCanonical || rho == 0.0) {
    setup(canonicalize(rho, a1, b1, a2, b2));
    return;
  }
  double best = std::numeric_limits<double>::infinity();
  FiniteProblem chosen;
  bool found = false;
  for (const auto& q : orientations(rho, a1, b1, a2, b2)) {
    if (cfg_.orientation == OrientationRule::TightestCanonical && !is_canonical(q)) continue;
    setup(q);
    if (!found || log_envelope_mass_ < best) best = log_envelope_mass_, chosen = q, found = true;
  }
  setup(found ? chosen : canonicalize(rho, a1, b1, a2, b2));
}

void FiniteSampler::setup(const FiniteProblem& p) {
  p_ = p;
  g_ = make_geometry(p_);
  m3_ = M3Weights{};
  tangent_ = TangentEnvelope{};
  tangent_p0_ = 1.0;
  independent_ = p_.rho == 0.0;
  case_ = classify_finite(g_, cfg_.delta);
  if (independent_) {
    log_envelope_mass_ = log_Phi_diff(p_.a1, p_.b1) + log_Phi_diff(p_.a2, p_.b2);
    return;
  }
  double top = kNegInf, sum = 0.0;
  const double* lw;
  int n;
  if (case_ == FiniteCase::M3) {
    m3_ = m3_weights(p_, g_, cfg_.left_rule);
    log_centre_height_ = log_Phi_diff(-g_.upsilon, g_.upsilon);
    lw = m3_.log_zeta.data(), n = 3;
  } else {
    tangent_ = build_tangent_envelope(p_, g_);
    if (tangent_.count == 2) tangent_p0_ = 1.0 / (1.0 + std::exp(tangent_.log_mass[1] - tangent_.log_mass[0]));
    lw = tangent_.log_mass.data(), n = 2;
  }
  for (int k = 0; k < n; ++k) top = std::max(top, lw[k]);
  for (int k = 0; k < n; ++k) sum += std::exp(lw[k] - top);
  log_envelope_mass_ = top + std::log(sum);
}

double FiniteSampler::log_target(double x1) const { return log_phi(x1) + log_kappa(x1, g_); }

double FiniteSampler::target(double x1) const { return std::exp(log_target(x1)); }

double FiniteSampler::log_envelope(double x1) const {
  if (independent_) return log_target(x1);
  if (case_ == FiniteCase::T) return tangent_.log_value(x1);
  const double w1 = g_.alpha * x1 + g_.beta1;
  const double wr = -(g_.alpha * x1 + g_.beta0);
  double log_factor;
  const bool has_l = m3_.log_zeta[0] > kNegInf, has_c = m3_.log_zeta[1] > kNegInf, has_r = m3_.log_zeta[2] > kNegInf;
  if (has_l && (x1 <= m3_.left_hi || !(has_c || has_r))) {
    log_factor = m3_.left_tilted ? std::log(m3_.d_left) + log_phi(w1) + kTilt * w1 : kLogSqrtHalfPi + log_phi(w1);
  } else if (has_c && (x1 <= m3_.centre_hi || !has_r)) {
    log_factor = log_centre_height_;
  } else {
    log_factor = kLogSqrtHalfPi + log_phi(wr);
  }
  return log_phi(x1) + log_factor;
}

double FiniteSampler::envelope(double x1) const { return std::exp(log_envelope(x1)); }

double FiniteSampler::draw_x2(double x1, RandomStream& s) {
  return sample_general({p_.a2, p_.b2, p_.rho * x1, p_.nu}, *table_, cfg_.univariate, s);
}

FiniteProposal FiniteSampler::propose(RandomStream& s, bool want_prob) {
  FiniteProposal out;
  const RegionTable& t = *table_;
  const SamplerConfig& uc = cfg_.univariate;
  if (independent_) {
    out.x1 = sample_interval(p_.a1, p_.b1, t, uc, s);
    out.x2 = sample_interval(p_.a2, p_.b2, t, uc, s);
    out.accepted = true;
    if (want_prob) out.accept_prob = 1.0;
    return out;
  }
  double log_ratio;
  if (case_ == FiniteCase::M3) {
    out.component = pick(m3_.log_zeta.data(), 3, s.uniform());
    const double nu = p_.nu;
    double x;
    switch (out.component) {
      case 0: {
        x = sample_general({p_.a1, m3_.left_hi, m3_.m_left, nu}, t, uc, s);
        const double w1 = g_.alpha * x + g_.beta1;
        log_ratio = log_kappa(x, g_) - (m3_.left_tilted ? std::log(m3_.d_left) + log_phi(w1) + kTilt * w1
                                                         : kLogSqrtHalfPi + log_phi(w1));
        break;
      }
      case 1:
        x = sample_interval(m3_.centre_lo, m3_.centre_hi, t, uc, s);
        log_ratio = log_kappa(x, g_) - log_centre_height_;
        break;
      default: {
        x = sample_general({m3_.right_lo, p_.b1, p_.rho * p_.b2, nu}, t, uc, s);
        const double wr = -(g_.alpha * x + g_.beta0);
        log_ratio = log_kappa(x, g_) - (kLogSqrtHalfPi + log_phi(wr));
        break;
      }
    }
    out.x1 = x;
  } else {
    const TangentEnvelope& e = tangent_;
    double lo = p_.a1, hi = e.cross, slope = e.slope_v;
    out.component = 0;
    if (e.count == 2 && s.uniform() >= tangent_p0_) {
      lo = e.cross, hi = p_.b1, slope = e.slope_w;
      out.component = 1;
    }
    out.x1 = lo < hi ? trunc_exp(lo, hi, -slope, s) : lo;
    log_ratio = xi(out.x1, g_) - e.log_value(out.x1);
  }
  if (!(log_ratio <= 1e-9)) throw std::logic_error("finite sampler: envelope below target");
  log_ratio = std::min(log_ratio, 0.0);
  if (want_prob) out.accept_prob = std::exp(log_ratio);
  out.accepted = std::log(s.uniform_pos()) <= log_ratio;
  if (out.accepted) out.x2 = draw_x2(out.x1, s);
  return out;
}

std::pair<double, double> FiniteSampler::sample(RandomStream& s, std::uint64_t* proposals) {
  std::uint64_t n = 0;
  FiniteProposal r;
  do {
    r = propose(s);
    ++n;
  } while (!r.accepted);
  if (proposals) *proposals += n;
  return p_.transform.to_original(r.x1, r.x2);
}

}  // namespace tgauss
