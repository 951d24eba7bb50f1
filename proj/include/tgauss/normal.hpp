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

// Gaussian density, distribution and quantile functions plus the envelope
// helpers used by the bivariate rejection samplers.

#pragma once

#include <numbers>

namespace tgauss {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;  // 1/sqrt(2 pi)
inline constexpr double kSqrtHalfPi = 1.25331413731550025120788264241;   // sqrt(pi/2)
inline constexpr double kSqrtTwoOverPi = 0.797884560802865355879892119869;  // sqrt(2/pi)

/// Exponential tilt shared by chi(), d_fun() and the tilted mixture components.
inline constexpr double kTilt = 0.68;

/// Standard normal density.
double phi(double x);
double log_phi(double x);

/// Standard normal CDF, absolute error below 1e-15 and full relative accuracy
/// in the left tail.
double Phi(double x);

/// log Phi(x), finite for every finite x.
double log_Phi(double x);

/// Phi(upper) - Phi(lower) without cancellation; requires lower <= upper.
double Phi_diff(double lower, double upper);

/// log(Phi(upper) - Phi(lower)); -inf when the interval is empty.
double log_Phi_diff(double lower, double upper);

/// Standard normal quantile (Wichura AS241). Throws std::domain_error unless
/// 0 < p < 1.
double Phi_inv(double p);

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

/// Mills-type ratio Phi(-x) / phi(x); positive and decreasing.
double psi(double x);

/// min(sqrt(pi/2), -1/x0) for x0 < 0 and sqrt(pi/2) at 0; throws for x0 > 0.
/// Satisfies Phi(x) <= c_fun(x0) phi(x) whenever x <= x0 <= 0.
double c_fun(double x0);

/// exp(kTilt x) psi(x).
double chi(double x);

/// max(sqrt(pi/2), chi(-x0)); throws for x0 > 0. Satisfies
/// Phi(x) <= d_fun(x0) phi(x) exp(kTilt x) whenever x0 <= x <= 0.
double d_fun(double x0);

/// Tail-series upper bound for Phi(z), z < 0:
///   phi(z)/|z| * (1 - 1/z^2 + 3/z^4).
/// Throws std::domain_error for z >= 0.
double Phi_upper_tail(double z);

/// Tail-series lower bound for Phi(z), z < 0:
///   phi(z)/|z| * (1 - 1/z^2 + 3/z^4 - 15/z^6).
double Phi_lower_tail(double z);

}  // namespace tgauss
