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

#include "tgauss/normal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tgauss {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrtPi = 0.564189583547756286948079451561;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

template <std::size_t N>
double polyval(const std::array<double, N>& coef, double x) {
  double acc = coef[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + coef[i];
  return acc;
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 4> kGLNodes = {0.183434642495649804939476142360,
                                            0.525532409916328985817739049189,
                                            0.796666477413626739591553936476,
                                            0.960289856497536231683560868569};
constexpr std::array<double, 4> kGLWeights = {0.362683783378361982965150449277,
                                              0.313706645877887287337962201987,
                                              0.222381034453374470544355994426,
                                              0.101228536290376259152531354310};

// log of Phi(lower + w) - Phi(lower) for a narrow interval, via
// phi(lower) * int_0^w exp(-lower s - s^2/2) ds.
double log_narrow_mass(double lower, double w) {
  const double half = 0.5 * w;
  double sum = 0.0;
  for (std::size_t k = 0; k < kGLNodes.size(); ++k) {
    for (double sign : {-1.0, 1.0}) {
      const double s = half + sign * half * kGLNodes[k];
      sum += kGLWeights[k] * std::exp(-lower * s - 0.5 * s * s);
    }
  }
  return log_phi(lower) + std::log(half * sum);
}

}  // namespace

double phi(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double log_phi(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double Phi(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double erfcx(double x) {
  if (x < 0.0) {
    // 2 exp(x^2) - erfcx(-x); overflows to +inf below about -26.6.
    const double sq = x * x;
    const double err = std::fma(x, x, -sq);
    return 2.0 * std::exp(sq) * (1.0 + err) - erfcx(-x);
  }
  if (x < 26.0) {
    const double sq = x * x;
    const double err = std::fma(x, x, -sq);
    return std::exp(sq) * (1.0 + err) * std::erfc(x);
  }
  // Continued fraction, evaluated backwards.
  double f = x;
  for (int n = 24; n >= 1; --n) f = x + (0.5 * n) / f;
  return kInvSqrtPi / f;
}

double psi(double x) { return kSqrtHalfPi * erfcx(x / kSqrt2); }

double log_Phi(double x) {
  if (x < -1.0) return std::log(0.5 * erfcx(-x / kSqrt2)) - 0.5 * x * x;
  if (x > 0.0) return std::log1p(-Phi(-x));
  return std::log(Phi(x));
}

double log_Phi_diff(double lower, double upper) {
  if (!(lower < upper)) return -std::numeric_limits<double>::infinity();
  if (lower >= 0.0) {
    const double l = -upper;
    upper = -lower;
    lower = l;
  }
  // Now lower < 0.
  const double width = upper - lower;
  if (width * (std::fabs(lower) + width) < 0.5 && std::isfinite(width))
    return log_narrow_mass(lower, width);
  if (upper > 0.0)
    return std::log(0.5 * (std::erf(upper / kSqrt2) + std::erf(-lower / kSqrt2)));
  const double lu = log_Phi(upper);
  const double delta = log_Phi(lower) - lu;
  return lu + std::log(-std::expm1(delta));
}

double Phi_diff(double lower, double upper) { return std::exp(log_Phi_diff(lower, upper)); }

double Phi_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("Phi_inv: p must lie in (0, 1)");
  static constexpr std::array<double, 8> a = {
      3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
      1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
      3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr std::array<double, 8> b = {
      1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2, 5.3941960214247511077e+3,
      2.1213794301586595867e+4, 3.9307895800092710610e+4, 2.8729085735721942674e+4,
      5.2264952788528545610e+3};
  static constexpr std::array<double, 8> c = {
      1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr std::array<double, 8> d = {
      1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9};
  static constexpr std::array<double, 8> e = {
      6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr std::array<double, 8> f = {
      1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * polyval(a, r) / polyval(b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = polyval(c, r) / polyval(d, r);
  } else {
    r -= 5.0;
    val = polyval(e, r) / polyval(f, r);
  }
  return q < 0.0 ? -val : val;
}

double c_fun(double x0) {
  if (x0 > 0.0) throw std::domain_error("c_fun: argument must be <= 0");
  if (x0 == 0.0) return kSqrtHalfPi;
  return std::min(kSqrtHalfPi, -1.0 / x0);
}

double chi(double x) { return std::exp(kTilt * x) * psi(x); }

double d_fun(double x0) {
  if (x0 > 0.0) throw std::domain_error("d_fun: argument must be <= 0");
  return std::max(kSqrtHalfPi, chi(-x0));
}

double Phi_upper_tail(double z) {
  if (!(z < 0.0)) throw std::domain_error("Phi_upper_tail: z must be negative");
  const double r = 1.0 / (z * z);
  return -phi(z) / z * (1.0 - r + 3.0 * r * r);
}

double Phi_lower_tail(double z) {
  if (!(z < 0.0)) throw std::domain_error("Phi_lower_tail: z must be negative");
  const double r = 1.0 / (z * z);
  return -phi(z) / z * (1.0 - r + 3.0 * r * r - 15.0 * r * r * r);
}

}  // namespace tgauss
