// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uavplace/density.hpp"
#include "uavplace/objective.hpp"
#include "uavplace/rng.hpp"

namespace uavplace::analysis {

struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Expected outage of n UAVs placed independently from `law`, estimated by
/// averaging P_O over `samples` random deployments. Its expectation is
/// int (E_U[1 - s(x, U)])^n f(x) dx, an upper bound on the optimal outage.
MonteCarloEstimate upper_bound_random(const Objective& objective, std::size_t n,
                                      const Density& law, std::size_t samples, RandomStream rng);
MonteCarloEstimate upper_bound_random(const Density& f, const ChannelModel& ch, std::size_t n,
                                      const Density& law, std::size_t samples, RandomStream rng);

/// The same bound with the inner expectation taken by quadrature over `law`.
double upper_bound_random_exact(const Objective& objective, std::size_t n, const Density& law);

/// (1 - e^{-lambda h^r})^n.
double lower_bound_altitude(double lambda, double h, double r, std::size_t n);

/// (1/3) (1 - exp(-3^{-r}))^n for the ground case h = 0 with a uniform
/// density of unit length and lambda = 1.
double lower_bound_ground_uniform(double r, std::size_t n);

struct ClosedForm {
  double value = 0.0;
  bool fallback = false;  // true when the alternating sum was replaced by quadrature
};

/// Outage of n co-located UAVs at the mean of a 1-D Gaussian (lambda = 1,
/// r = 2), integrating the density over mean +- window (infinite by default).
ClosedForm closed_form_gaussian(std::size_t n, double h, double sigma,
                                double window = kUnlimited);

/// Outage of n co-located UAVs at the centre of a uniform square of the given
/// half side (lambda = 1, r = 2). half_side = 0.5 is the unit square.
ClosedForm closed_form_uniform_square(std::size_t n, double h, double half_side = 0.5);

struct AsymptoticOptimum {
  Point u_star;
  double single_success = 0.0;                // int s(x, u*) f(x) dx
  double predicted_one_minus_outage = 0.0;    // n times single_success
};

/// Maximiser of the single-UAV success. Unimodal densities return their centre;
/// otherwise a multi-start pattern search over the support box is used.
/// Throws std::runtime_error, naming the best iterate, if the search fails to
/// settle.
AsymptoticOptimum asymptotic_optimum(const Objective& objective, std::size_t n);

struct MarcumBound {
  double value = 0.0;     // exp(-b^2/2 + a b)
  double reported = 0.0;  // min(value, 1)
  bool clipped = false;
};
MarcumBound marcum_upper_bound(double a, double b);

struct BoundReport {
  double lower = 0.0;
  double upper = 1.0;
  double upper_standard_error = 0.0;
  double achieved = 0.0;
  std::vector<std::string> witnesses;

  /// lower <= achieved + tol and achieved <= upper + sigmas * SE + tol.
  bool consistent(double tol, double sigmas = 2.0) const;
};

/// Bounds around an achieved outage for a Rayleigh instance. The ground bound
/// joins the lower side only for h = 0, lambda = 1 and a unit-length uniform
/// density.
BoundReport bound_report(const Objective& objective, std::size_t n, double achieved,
                         const Density& law, std::size_t samples, RandomStream rng);

}  // namespace uavplace::analysis
