// SPDX-License-Identifier: Apache-2.0
#include "uavplace/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "uavplace/quadrature.hpp"

namespace uavplace::special {

namespace {

// Below this the power series is used; above it the asymptotic expansion
// reaches full double precision before its terms start to grow.
constexpr double kI0SeriesLimit = 25.0;
// Series branch of Q1 up to this value of a*b.
constexpr double kMarcumSeriesLimit = 200.0;

double i0_power_series(double t) {
  const double q = 0.25 * t * t;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

double i0e_asymptotic(double t) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (8.0 * k * t);
    if (next > term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * t);
}

struct QPair {
  double q;
  double p;  // 1 - q
};

// Q1 by quadrature of the defining integral with the scaled integrand
// x exp(-(x-a)^2/2) e^{-ax} I0(ax).
QPair marcum_by_quadrature(double a, double b) {
  auto integrand = [a](double x) {
    const double d = x - a;
    return x * std::exp(-0.5 * d * d) * bessel_i0e(a * x);
  };
  constexpr double kTail = 40.0;
  if (b >= a) {
    const double q =
        quadrature::integrate_adaptive(integrand, b, b + kTail, 1e-15, 1e-14, 1000000).value;
    return {q, 1.0 - q};
  }
  const double lo = std::max(0.0, a - kTail);
  const double p =
      lo >= b ? 0.0
              : quadrature::integrate_adaptive(integrand, lo, b, 1e-15, 1e-14, 1000000).value;
  return {1.0 - p, p};
}

QPair marcum(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw std::invalid_argument("marcum_q1 requires a, b >= 0");
  if (b == 0.0) return {1.0, 0.0};
  if (a == 0.0) {
    const double x = -0.5 * b * b;
    return {std::exp(x), -std::expm1(x)};
  }
  const double z = a * b;
  if (z > kMarcumSeriesLimit) return marcum_by_quadrature(a, b);

  const auto terms = static_cast<std::size_t>(std::ceil(std::sqrt(80.0 * z))) + 30;
  std::vector<double> ie(terms);
  bessel_ie_sequence(z, ie);
  const double d = a - b;
  const double scale = std::exp(-0.5 * d * d);
  if (a < b) {
    // Q1 = e^{-(a-b)^2/2} sum_{k>=0} (a/b)^k e^{-ab} I_k(ab)
    const double ratio = a / b;
    double power = 1.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < terms; ++k) {
      sum += power * ie[k];
      power *= ratio;
    }
    const double q = std::min(1.0, scale * sum);
    return {q, 1.0 - q};
  }
  // 1 - Q1 = e^{-(a-b)^2/2} sum_{k>=1} (b/a)^k e^{-ab} I_k(ab)
  const double ratio = b / a;
  double power = ratio;
  double sum = 0.0;
  for (std::size_t k = 1; k < terms; ++k) {
    sum += power * ie[k];
    power *= ratio;
  }
  const double p = std::min(1.0, scale * sum);
  return {1.0 - p, p};
}

}  // namespace

double bessel_i0(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("bessel_i0 requires t >= 0");
  if (t <= kI0SeriesLimit) return i0_power_series(t);
  return i0e_asymptotic(t) * std::exp(t);
}

double bessel_i0e(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("bessel_i0e requires t >= 0");
  if (t <= kI0SeriesLimit) return i0_power_series(t) * std::exp(-t);
  return i0e_asymptotic(t);
}

void bessel_ie_sequence(double z, std::span<double> out) {
  if (out.empty()) return;
  if (!(z >= 0.0)) throw std::invalid_argument("bessel_ie_sequence requires z >= 0");
  std::fill(out.begin(), out.end(), 0.0);
  out[0] = bessel_i0e(z);
  if (z == 0.0 || out.size() == 1) return;

  const std::size_t kmax = out.size() - 1;
  const double kk = static_cast<double>(kmax);
  const auto start = static_cast<std::size_t>(std::ceil(std::sqrt(kk * kk + 100.0 * z))) + 20;
  constexpr double kBig = 1e250;
  double above = 0.0;  // I_{k+1}
  double current = 1e-280;  // I_k, arbitrary start
  for (std::size_t k = start; k >= 1; --k) {
    const double below = above + (2.0 * static_cast<double>(k) / z) * current;
    above = current;
    current = below;
    if (k - 1 <= kmax) out[k - 1] = current;
    if (std::abs(current) > kBig) {
      current /= kBig;
      above /= kBig;
      for (std::size_t j = k - 1; j <= kmax; ++j) out[j] /= kBig;
    }
  }
  // out[0] now holds the unnormalised I_0.
  const double norm = bessel_i0e(z) / out[0];
  for (auto& v : out) v *= norm;
}

double marcum_q1(double a, double b) { return marcum(a, b).q; }

double marcum_q1_complement(double a, double b) { return marcum(a, b).p; }

}  // namespace uavplace::special
