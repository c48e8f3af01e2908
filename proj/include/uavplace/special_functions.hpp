// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace uavplace::special {

/// Modified Bessel function I0(t), t >= 0. Overflows to +inf beyond t ~ 713.
double bessel_i0(double t);

/// Exponentially scaled e^{-t} I0(t); finite for every t >= 0.
double bessel_i0e(double t);

/// e^{-z} I_k(z) for k = 0 .. out.size()-1, z >= 0, via Miller's backward
/// recurrence normalised by bessel_i0e.
void bessel_ie_sequence(double z, std::span<double> out);

/// First-order Marcum Q function Q1(a, b), a, b >= 0. Absolute accuracy
/// ~1e-14 on the series branch; the quadrature branch (ab > 200) targets 1e-13.
double marcum_q1(double a, double b);

/// 1 - Q1(a, b), accurate in relative terms when Q1 is close to one.
double marcum_q1_complement(double a, double b);

}  // namespace uavplace::special
