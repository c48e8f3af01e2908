// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "uavplace/geometry.hpp"
#include "uavplace/rng.hpp"

namespace uavplace {

/// Rayleigh fading: success probability exp(-lambda (d^2 + h^2)^{r/2}).
struct RayleighParams {
  double lambda = 1.0;
  double path_loss_exponent = 2.0;
  double altitude = 0.0;

  void validate() const;
};

enum class AngleUnit { radians, degrees };

/// Elevation-dependent Rician fading. The elevation angle theta is always in
/// radians; los_angle_unit only selects the unit the LOS-probability law is
/// fitted in (its a2, b2 constants).
struct RicianParams {
  double lambda = 1.0;
  double altitude = 0.0;
  double a1 = -1.5, b1 = 3.5;  // path-loss exponent r = a1 Plos + b1
  double a2 = 4.88, b2 = 0.43;  // Plos = 1 / (1 + a2 exp(-b2 (theta - a2)))
  double a3 = 5.0, b3 = 0.0;    // K = a3 exp(b3 theta)
  AngleUnit los_angle_unit = AngleUnit::radians;

  /// Suburban 2.4 GHz constants (a1..b3 with b3 = (2/pi) ln 3).
  static RicianParams suburban(double lambda, double altitude);
  void validate() const;
};

using ChannelModel = std::variant<RayleighParams, RicianParams>;

double altitude_of(const ChannelModel& ch);
ChannelModel with_altitude(ChannelModel ch, double h);
ChannelModel with_lambda(ChannelModel ch, double lambda);
std::string channel_name(const ChannelModel& ch);
void validate(const ChannelModel& ch);

struct ElevationLaws {
  double path_loss_exponent;
  double k_factor;
  double los_probability;
};

/// r(theta), K(theta), Plos(theta) for theta in [0, pi/2] radians.
ElevationLaws elevation_laws(double theta, const RicianParams& p);

/// Elevation angle seen from ground distance d; zenith (pi/2) at d = 0.
double elevation_angle(double ground_distance, double altitude);

/// lambda = (2^rho - 1) 10^{-AP/N0[dB] / 10}.
double lambda_from_link(double ap_over_n0_db, double rho);

/// Per-UAV success probabilities as functions of horizontal distance.
double rayleigh_success_at(double ground_distance, const RayleighParams& p);
double rician_success_at(double ground_distance, const RicianParams& p);
/// 1 - success, computed without cancellation.
double rayleigh_outage_at(double ground_distance, const RayleighParams& p);
double rician_outage_at(double ground_distance, const RicianParams& p);

double rayleigh_success(const Point& x, const Point& u, const RayleighParams& p);
double rician_success(const Point& x, const Point& u, const RicianParams& p);
double success(const Point& x, const Point& u, const ChannelModel& ch);
double success_at(double ground_distance, const ChannelModel& ch);
double outage_at(double ground_distance, const ChannelModel& ch);

/// Outage threshold lambda (d^2 + h^2)^{r/2} on |beta|^2 (r = r(theta) for Rician).
double fading_threshold(double ground_distance, const ChannelModel& ch);

/// Empirical outage from simulated unit-power fading draws.
struct MonteCarloOutage {
  double probability;
  double standard_error;
  std::size_t trials;
};
MonteCarloOutage simulate_outage_mc(const Point& x, const Point& u, const ChannelModel& ch,
                                    std::size_t trials, RandomStream rng);

}  // namespace uavplace
