// SPDX-License-Identifier: Apache-2.0
#include "uavplace/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uavplace/special_functions.hpp"

namespace uavplace {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

double slant_squared(double ground_distance, double altitude) {
  return ground_distance * ground_distance + altitude * altitude;
}

double rayleigh_exponent(double ground_distance, const RayleighParams& p) {
  const double s = slant_squared(ground_distance, p.altitude);
  if (s == 0.0) return 0.0;
  return p.path_loss_exponent == 2.0 ? p.lambda * s
                                     : p.lambda * std::pow(s, 0.5 * p.path_loss_exponent);
}

struct MarcumArgs {
  double a;
  double b;
};

MarcumArgs rician_args(double ground_distance, const RicianParams& p) {
  const double theta = elevation_angle(ground_distance, p.altitude);
  const ElevationLaws laws = elevation_laws(theta, p);
  const double s = slant_squared(ground_distance, p.altitude);
  const double power = s == 0.0 ? 0.0 : std::pow(s, 0.5 * laws.path_loss_exponent);
  return {std::sqrt(2.0 * laws.k_factor),
          std::sqrt(2.0 * p.lambda * (laws.k_factor + 1.0) * power)};
}

}  // namespace

void RayleighParams::validate() const {
  if (!finite_nonneg(lambda)) throw std::invalid_argument("rayleigh: lambda must be >= 0");
  if (!(std::isfinite(path_loss_exponent) && path_loss_exponent > 0.0))
    throw std::invalid_argument("rayleigh: path-loss exponent must be > 0");
  if (!finite_nonneg(altitude)) throw std::invalid_argument("rayleigh: altitude must be >= 0");
}

RicianParams RicianParams::suburban(double lambda, double altitude) {
  RicianParams p;
  p.lambda = lambda;
  p.altitude = altitude;
  p.b3 = (2.0 / std::numbers::pi) * std::log(3.0);
  return p;
}

void RicianParams::validate() const {
  if (!finite_nonneg(lambda)) throw std::invalid_argument("rician: lambda must be >= 0");
  if (!finite_nonneg(altitude)) throw std::invalid_argument("rician: altitude must be >= 0");
  for (double v : {a1, b1, a2, b2, a3, b3})
    if (!std::isfinite(v)) throw std::invalid_argument("rician: law constants must be finite");
  if (a3 < 0.0) throw std::invalid_argument("rician: a3 must be >= 0 (K-factor)");
  // r is affine in Plos and Plos is monotone in theta, so the endpoints suffice.
  for (double theta : {0.0, 0.5 * std::numbers::pi}) {
    const ElevationLaws laws = elevation_laws(theta, *this);
    if (!(laws.path_loss_exponent > 0.0))
      throw std::invalid_argument("rician: path-loss exponent r(theta) must stay > 0");
  }
}

double altitude_of(const ChannelModel& ch) {
  return std::visit([](const auto& p) { return p.altitude; }, ch);
}

ChannelModel with_altitude(ChannelModel ch, double h) {
  std::visit([h](auto& p) { p.altitude = h; }, ch);
  return ch;
}

ChannelModel with_lambda(ChannelModel ch, double lambda) {
  std::visit([lambda](auto& p) { p.lambda = lambda; }, ch);
  return ch;
}

std::string channel_name(const ChannelModel& ch) {
  return std::holds_alternative<RayleighParams>(ch) ? "rayleigh" : "rician";
}

void validate(const ChannelModel& ch) {
  std::visit([](const auto& p) { p.validate(); }, ch);
}

ElevationLaws elevation_laws(double theta, const RicianParams& p) {
  const double los_theta =
      p.los_angle_unit == AngleUnit::degrees ? theta * (180.0 / std::numbers::pi) : theta;
  const double plos = 1.0 / (1.0 + p.a2 * std::exp(-p.b2 * (los_theta - p.a2)));
  return {p.a1 * plos + p.b1, p.a3 * std::exp(p.b3 * theta), plos};
}

double elevation_angle(double ground_distance, double altitude) {
  if (ground_distance == 0.0) return 0.5 * std::numbers::pi;
  return std::atan2(altitude, std::abs(ground_distance));
}

double lambda_from_link(double ap_over_n0_db, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("lambda_from_link: rho must be > 0");
  return std::expm1(rho * std::numbers::ln2) * std::pow(10.0, -ap_over_n0_db / 10.0);
}

double rayleigh_success_at(double ground_distance, const RayleighParams& p) {
  return std::exp(-rayleigh_exponent(ground_distance, p));
}

double rayleigh_outage_at(double ground_distance, const RayleighParams& p) {
  return -std::expm1(-rayleigh_exponent(ground_distance, p));
}

double rician_success_at(double ground_distance, const RicianParams& p) {
  const MarcumArgs m = rician_args(ground_distance, p);
  return special::marcum_q1(m.a, m.b);
}

double rician_outage_at(double ground_distance, const RicianParams& p) {
  const MarcumArgs m = rician_args(ground_distance, p);
  return special::marcum_q1_complement(m.a, m.b);
}

double rayleigh_success(const Point& x, const Point& u, const RayleighParams& p) {
  require_same_dim(x, u);
  return rayleigh_success_at(distance(x, u), p);
}

double rician_success(const Point& x, const Point& u, const RicianParams& p) {
  require_same_dim(x, u);
  return rician_success_at(distance(x, u), p);
}

double success(const Point& x, const Point& u, const ChannelModel& ch) {
  require_same_dim(x, u);
  return success_at(distance(x, u), ch);
}

double success_at(double ground_distance, const ChannelModel& ch) {
  if (const auto* r = std::get_if<RayleighParams>(&ch)) return rayleigh_success_at(ground_distance, *r);
  return rician_success_at(ground_distance, std::get<RicianParams>(ch));
}

double outage_at(double ground_distance, const ChannelModel& ch) {
  if (const auto* r = std::get_if<RayleighParams>(&ch)) return rayleigh_outage_at(ground_distance, *r);
  return rician_outage_at(ground_distance, std::get<RicianParams>(ch));
}

double fading_threshold(double ground_distance, const ChannelModel& ch) {
  if (const auto* r = std::get_if<RayleighParams>(&ch)) return rayleigh_exponent(ground_distance, *r);
  const auto& p = std::get<RicianParams>(ch);
  const double s = slant_squared(ground_distance, p.altitude);
  if (s == 0.0) return 0.0;
  const ElevationLaws laws = elevation_laws(elevation_angle(ground_distance, p.altitude), p);
  return p.lambda * std::pow(s, 0.5 * laws.path_loss_exponent);
}

MonteCarloOutage simulate_outage_mc(const Point& x, const Point& u, const ChannelModel& ch,
                                    std::size_t trials, RandomStream rng) {
  if (trials == 0) throw std::invalid_argument("simulate_outage_mc: trials must be >= 1");
  require_same_dim(x, u);
  validate(ch);
  const double d = distance(x, u);
  const double threshold = fading_threshold(d, ch);
  MonteCarloOutage out{0.0, 0.0, trials};
  if (threshold == 0.0) return out;

  std::size_t below = 0;
  if (std::holds_alternative<RayleighParams>(ch)) {
    for (std::size_t t = 0; t < trials; ++t) {
      const double gain = -std::log1p(-rng.uniform());
      if (gain < threshold) ++below;
    }
  } else {
    const auto& p = std::get<RicianParams>(ch);
    const double k = elevation_laws(elevation_angle(d, p.altitude), p).k_factor;
    const double los = std::sqrt(k / (k + 1.0));
    const double scatter = 1.0 / std::sqrt(2.0 * (k + 1.0));
    for (std::size_t t = 0; t < trials; ++t) {
      const double re = los + scatter * rng.normal();
      const double im = scatter * rng.normal();
      if (re * re + im * im < threshold) ++below;
    }
  }
  const double n = static_cast<double>(trials);
  out.probability = static_cast<double>(below) / n;
  out.standard_error = std::sqrt(out.probability * (1.0 - out.probability) / n);
  return out;
}

}  // namespace uavplace
