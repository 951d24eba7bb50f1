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

#include "tgauss/bivariate_semifinite.hpp"

#include <cmath>
#include <stdexcept>

#include "tgauss/normal.hpp"

namespace tgauss {
namespace {

constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;
// Below this phi(w) the product u * bound * phi(w) loses its meaning in
// double precision; the ratio form is used instead.
constexpr double kTinyDensity = 1e-280;

}  // namespace

std::string_view to_string(SemiCase c) {
  switch (c) {
    case SemiCase::SPlus: return "S+";
    case SemiCase::SMinus: return "S-";
    case SemiCase::MPlus: return "M+";
    case SemiCase::MMinus: return "M-";
  }
  return "?";
}

SemiFiniteProblem make_semifinite(double rho, double a1, double a2) {
  if (!std::isfinite(rho) || std::isnan(a1) || std::isnan(a2))
    throw std::invalid_argument("semi-finite problem: non-finite parameter");
  if (!(std::abs(rho) < kMaxAbsRho))
    throw std::invalid_argument("semi-finite problem: |rho| must be below 1 - 1e-12");
  SemiFiniteProblem p;
  p.rho = rho;
  p.swapped = a1 < a2;
  p.a1 = p.swapped ? a2 : a1;
  p.a2 = p.swapped ? a1 : a2;
  p.nu2 = (1.0 - rho) * (1.0 + rho);
  p.nu = std::sqrt(p.nu2);
  return p;
}

SemiCase classify(const SemiFiniteProblem& p) {
  const double m = p.rho * p.a1 - p.a2;
  if (p.rho >= 0.0) return m >= 0.0 ? SemiCase::SPlus : SemiCase::MPlus;
  if (p.a1 <= kOneThirdQuantile) return SemiCase::SPlus;
  return m <= 0.0 ? SemiCase::SMinus : SemiCase::MMinus;
}

SemiFiniteSampler::SemiFiniteSampler(double rho, double a1, double a2, const RegionTable& table, SamplerConfig cfg,
                                     bool tail_early_exit)
    : p_(make_semifinite(rho, a1, a2)),
      case_(classify(p_)),
      independent_(p_.rho == 0.0),
      table_(&table),
      cfg_(cfg),
      ctx_(table, tail_early_exit) {
  if (!std::isfinite(p_.a1)) throw std::invalid_argument("semi-finite problem: a1 must be finite");
  const double rho_ = p_.rho, nu = p_.nu, ra1 = p_.a1, ra2 = p_.a2;
  const double w0 = (rho_ * ra1 - ra2) / nu;
  switch (case_) {
    case SemiCase::SPlus:
      break;
    case SemiCase::SMinus:
      bound_ = c_fun(w0);
      break;
    case SemiCase::MMinus: {
      bound_ = kSqrtHalfPi;
      split_ = ra2 / rho_;
      weights_.log_w1 = log_Phi_diff(ra1, split_);
      weights_.log_w2 = std::log(0.5 * nu) - 0.5 * ra2 * ra2 + log_Phi(-ra2 * nu / rho_);
      break;
    }
    case SemiCase::MPlus: {
      if (independent_) break;
      bound_ = d_fun(w0);
      split_ = ra2 / rho_;
      const double theta = rho_ * (ra2 + kTilt * nu);
      weights_.theta = theta;
      weights_.log_w1 = log_Phi(-split_);
      weights_.log_w2 = std::log(bound_) + std::log(nu) - kLogSqrt2Pi +
                        (theta * theta - ra2 * ra2 - 2.0 * kTilt * nu * ra2) / (2.0 * p_.nu2) +
                        log_Phi_diff((ra1 - theta) / nu, (split_ - theta) / nu);
      break;
    }
  }
  if (case_ == SemiCase::MMinus || (case_ == SemiCase::MPlus && !independent_)) {
    weights_.w1 = std::exp(weights_.log_w1);
    weights_.w2 = std::exp(weights_.log_w2);
    weights_.p1 = 1.0 / (1.0 + std::exp(weights_.log_w2 - weights_.log_w1));
  }
}

double SemiFiniteSampler::target(double x1) const {
  return phi(x1) * Phi((p_.rho * x1 - p_.a2) / p_.nu);
}

double SemiFiniteSampler::envelope(double x1) const {
  const double w = (p_.rho * x1 - p_.a2) / p_.nu;
  if (independent_) return phi(x1) * Phi(-p_.a2);
  switch (case_) {
    case SemiCase::SPlus: return phi(x1);
    case SemiCase::SMinus: return bound_ * phi(x1) * phi(w);
    case SemiCase::MMinus: return x1 <= split_ ? phi(x1) : bound_ * phi(x1) * phi(w);
    case SemiCase::MPlus: return x1 >= split_ ? phi(x1) : bound_ * phi(x1) * phi(w) * std::exp(kTilt * w);
  }
  return 0.0;
}

bool SemiFiniteSampler::accept_phi(double w, double u, double scale, bool tilt, SemiProposal& out) {
  const double f = phi(w) * (tilt ? std::exp(kTilt * w) : 1.0);
  if (out.accept_prob >= -0.5 || f < kTinyDensity) {
    const double prob = psi(-w) / (scale * (tilt ? std::exp(kTilt * w) : 1.0));
    if (out.accept_prob >= -0.5) out.accept_prob = prob;
    if (f < kTinyDensity) {
      lazy_.record(DecidedBy::Exact);
      out.used_exact = true;
      return u <= prob;
    }
  }
  const LazyCompareOutcome r = lazy_phi_at_least(w, u * scale * f, ctx_);
  lazy_.record(r.decided_by);
  out.used_exact = r.used_exact;
  return r.above();
}

double SemiFiniteSampler::draw_x2_tail(double x1, RandomStream& s) {
  return sample_general({p_.a2, kInf, p_.rho * x1, p_.nu}, *table_, cfg_, s);
}

SemiProposal SemiFiniteSampler::propose(RandomStream& s, bool want_prob) {
  SemiProposal out;
  if (want_prob) out.accept_prob = 0.0;
  const RegionTable& t = *table_;
  const double rho = p_.rho, nu = p_.nu, a1 = p_.a1, a2 = p_.a2;
  if (independent_) {
    out.x1 = sample_lower(a1, t, s);
    out.x2 = sample_lower(a2, t, s);
    out.accepted = true;
    if (want_prob) out.accept_prob = 1.0;
    return out;
  }
  // Joint shortcut: X1 from a standard normal piece, X2 unconstrained, keep if X2 >= a2.
  auto joint = [&](double x1) {
    out.x1 = x1;
    out.x2 = rho * x1 + nu * s.normal();
    out.accepted = out.x2 >= a2;
    if (want_prob) out.accept_prob = Phi((rho * x1 - a2) / nu);
  };
  // Marginal step: accept x1 against the Phi bound, then draw X2 | X1.
  auto marginal = [&](double x1, bool tilt) {
    out.x1 = x1;
    const double w = (rho * x1 - a2) / nu;
    out.accepted = accept_phi(w, s.uniform(), bound_, tilt, out);
    if (out.accepted) out.x2 = draw_x2_tail(x1, s);
  };
  switch (case_) {
    case SemiCase::SPlus:
      joint(sample_lower(a1, t, s));
      break;
    case SemiCase::SMinus:
      marginal(sample_general({a1, kInf, rho * a2, nu}, t, cfg_, s), false);
      break;
    case SemiCase::MMinus:
      if (s.uniform() < weights_.p1) {
        joint(sample_interval(a1, split_, t, cfg_, s));
      } else {
        out.component = 2;
        marginal(sample_general({split_, kInf, rho * a2, nu}, t, cfg_, s), false);
      }
      break;
    case SemiCase::MPlus:
      if (s.uniform() < weights_.p1) {
        joint(sample_lower(split_, t, s));
      } else {
        out.component = 2;
        marginal(sample_general({a1, split_, weights_.theta, nu}, t, cfg_, s), true);
      }
      break;
  }
  return out;
}

std::pair<double, double> SemiFiniteSampler::sample(RandomStream& s, std::uint64_t* proposals) {
  std::uint64_t n = 0;
  SemiProposal r;
  do {
    r = propose(s);
    ++n;
  } while (!r.accepted);
  if (proposals) *proposals += n;
  return p_.swapped ? std::pair{r.x2, r.x1} : std::pair{r.x1, r.x2};
}

}  // namespace tgauss
