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

// Bivariate standard normal with correlation rho truncated to the box
// [a1, b1] x [a2, b2]. The X1 marginal phi(x1) kappa(x1) is sampled by a
// three-piece mixture (M3) when the X2 window is wide and by a tangent-line
// envelope of the log-concave marginal (T) when it is narrow.

#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "tgauss/rng.hpp"
#include "tgauss/tables.hpp"
#include "tgauss/univariate.hpp"

namespace tgauss {

enum class FiniteCase : std::uint8_t { M3, T };

std::string_view to_string(FiniteCase c);

/// How the left M3 component picks between the tilted (lambda = 0.68) and
/// untilted envelope. Both dominate the target.
enum class LeftWeightRule : std::uint8_t {
  Literal,        // tilted iff max(b1, gamma1) > 0
  ArgumentRange,  // tilted iff the Phi argument on the left piece reaches above -x_d
  TighterWeight,  // whichever envelope has the smaller mass
};

/// Point where chi returns to twice its minimum on [0, inf).
inline constexpr double kChiDoubling = 3.117;

struct FiniteTransform {
  bool flip2 = false;   // X2 negated to make rho >= 0
  bool swap = false;    // components exchanged
  bool negate = false;  // both components negated

  /// Maps a canonical draw back to the caller's coordinates.
  std::pair<double, double> to_original(double y1, double y2) const;
};

struct FiniteProblem {
  double rho = 0.0;
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
  double nu2 = 1.0;
  double nu = 1.0;
  FiniteTransform transform;
};

/// Canonical form: rho >= 0, b2 >= 0 and (a2 >= a1 or b1 <= 0). Throws
/// std::invalid_argument for empty or non-finite boxes and |rho| >= 1 - 1e-12.
/// The four sign/swap orientations of the problem, each with rho >= 0.
std::vector<FiniteProblem> orientations(double rho, double a1, double b1, double a2, double b2);

/// b2 >= 0 and (a2 >= a1 or b1 <= 0).
bool is_canonical(const FiniteProblem& p);

/// First canonical orientation.
FiniteProblem canonicalize(double rho, double a1, double b1, double a2, double b2);

struct FiniteGeometry {
  double alpha = 0.0;
  double beta0 = 0.0, beta1 = 0.0;
  double gamma0 = 0.0, gamma1 = 0.0;
  double upsilon = 0.0;
};

FiniteGeometry make_geometry(const FiniteProblem& p);

/// Phi(alpha x + beta1) - Phi(alpha x + beta0), and its logarithm.
double kappa(double x1, const FiniteGeometry& g);
double log_kappa(double x1, const FiniteGeometry& g);

/// Log marginal density log phi(x1) + log kappa(x1) and its derivative.
double xi(double x1, const FiniteGeometry& g);
double xi_prime(double x1, const FiniteGeometry& g);

FiniteCase classify_finite(const FiniteGeometry& g, double delta = 2.0);

struct M3Weights {
  double zeta_l = 0.0, zeta_c = 0.0, zeta_r = 0.0;
  std::array<double, 3> log_zeta{-kInf, -kInf, -kInf};  // -inf for empty pieces
  bool left_tilted = false;
  double d_left = 0.0;  // d(alpha a1 + beta1) when tilted
  double m_left = 0.0;  // left proposal mean
  // Pieces of [a1, b1]: left [a1, left_hi], centre [centre_lo, centre_hi], right [right_lo, b1].
  double left_hi = 0.0, centre_lo = 0.0, centre_hi = 0.0, right_lo = 0.0;
};

M3Weights m3_weights(const FiniteProblem& p, const FiniteGeometry& g, LeftWeightRule rule = LeftWeightRule::Literal);

/// One or two tangent lines to xi: line v on [a1, cross], line w on [cross, b1].
struct TangentEnvelope {
  int count = 1;
  double v = 0.0, w = 0.0;
  double xi_v = 0.0, xi_w = 0.0;
  double slope_v = 0.0, slope_w = 0.0;
  double cross = 0.0;                  // switch point from line v to line w
  std::array<double, 2> log_mass{};    // log integral of exp(line) over each piece

  double log_value(double x) const;
};

TangentEnvelope build_tangent_envelope(const FiniteProblem& p, const FiniteGeometry& g);

enum class OrientationRule : std::uint8_t {
  FirstCanonical,    // first canonical orientation
  TightestCanonical, // canonical orientation with the smallest envelope mass
  TightestAny,       // any orientation, smallest envelope mass
};

struct FiniteConfig {
  double delta = 2.0;
  LeftWeightRule left_rule = LeftWeightRule::Literal;
  OrientationRule orientation = OrientationRule::TightestAny;
  SamplerConfig univariate;
};

struct FiniteProposal {
  bool accepted = false;
  double x1 = 0.0;  // canonical coordinates
  double x2 = 0.0;
  int component = 0;  // M3: 0 left, 1 centre, 2 right; T: tangent piece
  double accept_prob = -1.0;
};

class FiniteSampler {
 public:
  FiniteSampler(double rho, double a1, double b1, double a2, double b2, const RegionTable& table,
                FiniteConfig cfg = {});

  const FiniteProblem& problem() const { return p_; }
  const FiniteGeometry& geometry() const { return g_; }
  FiniteCase label() const { return case_; }
  bool independent() const { return independent_; }
  const M3Weights& m3() const { return m3_; }
  const TangentEnvelope& tangent() const { return tangent_; }

  /// Unnormalised X1 marginal phi(x1) kappa(x1), canonical coordinates.
  double target(double x1) const;
  /// Unnormalised envelope of the active scheme on [a1, b1].
  double envelope(double x1) const;
  double log_target(double x1) const;
  double log_envelope(double x1) const;
  /// log of the envelope integral over [a1, b1]; the target integrates to the box probability.
  double log_envelope_mass() const { return log_envelope_mass_; }

  FiniteProposal propose(RandomStream& s, bool want_prob = false);
  std::pair<double, double> sample(RandomStream& s, std::uint64_t* proposals = nullptr);

 private:
  void setup(const FiniteProblem& p);
  double draw_x2(double x1, RandomStream& s);

  FiniteProblem p_;
  FiniteGeometry g_;
  FiniteCase case_ = FiniteCase::M3;
  bool independent_ = false;
  M3Weights m3_;
  std::array<double, 3> m3_cdf_{};
  TangentEnvelope tangent_;
  double tangent_p0_ = 1.0;
  double log_centre_height_ = 0.0;  // log(2 Phi(upsilon) - 1)
  double log_envelope_mass_ = 0.0;
  const RegionTable* table_;
  FiniteConfig cfg_;
};

}  // namespace tgauss
