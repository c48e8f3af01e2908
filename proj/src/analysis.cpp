// SPDX-License-Identifier: Apache-2.0
#include "uavplace/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "uavplace/optimizers.hpp"
#include "uavplace/quadrature.hpp"

namespace uavplace::analysis {

namespace {

constexpr std::size_t kMaxAlternatingTerms = 60;

// Neumaier's variant of Kahan summation; also returns sum |t| for the
// cancellation check.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  double magnitude = 0.0;
  void add(double t) {
    const double s = sum + t;
    if (std::abs(sum) >= std::abs(t))
      carry += (sum - s) + t;
    else
      carry += (t - s) + sum;
    sum = s;
    magnitude += std::abs(t);
  }
  double value() const { return sum + carry; }
};

double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t j = 1; j <= k; ++j) c = c * double(n - k + j) / double(j);
  return c;
}

// Rounding bound of the alternating sum relative to its value.
bool cancelled(const CompensatedSum& s, std::size_t n) {
  const double eps = std::numeric_limits<double>::epsilon();
  return s.magnitude * eps * double(n + 1) > 1e-8 * std::abs(s.value());
}

double collapsed_factor(double h2, double r2, std::size_t n) {
  return std::pow(-std::expm1(-(h2 + r2)), double(n));
}

double gaussian_by_quadrature(std::size_t n, double h, double sigma, double window) {
  const double reach = std::min(window, 40.0 * sigma);
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  auto integrand = [&](double x) {
    return collapsed_factor(h * h, x * x, n) * norm * std::exp(-0.5 * x * x / (sigma * sigma));
  };
  return 2.0 * quadrature::integrate_adaptive(integrand, 0.0, reach, 0.0, 1e-12, 4'000'000).value;
}

double square_by_quadrature(std::size_t n, double h, double half_side) {
  auto row = [&](double x) {
    auto inner = [&](double y) { return collapsed_factor(h * h, x * x + y * y, n); };
    return quadrature::integrate_adaptive(inner, 0.0, half_side, 0.0, 1e-13, 4'000'000).value;
  };
  const double v = quadrature::integrate_adaptive(row, 0.0, half_side, 0.0, 1e-12, 4'000'000).value;
  return v / (half_side * half_side);
}

}  // namespace

MonteCarloEstimate upper_bound_random(const Objective& objective, std::size_t n,
                                      const Density& law, std::size_t samples, RandomStream rng) {
  if (samples == 0) throw std::invalid_argument("upper_bound_random: samples must be >= 1");
  if (law.dim() != objective.dim())
    throw std::invalid_argument("upper_bound_random: placement law dimension mismatch");
  // Welford running mean and variance.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double p = objective.outage(random_deployment(law, n, rng));
    const double delta = p - mean;
    mean += delta / double(s + 1);
    m2 += delta * (p - mean);
  }
  MonteCarloEstimate out;
  out.value = mean;
  out.samples = samples;
  out.standard_error = samples > 1 ? std::sqrt(m2 / double(samples - 1) / double(samples)) : 0.0;
  return out;
}

MonteCarloEstimate upper_bound_random(const Density& f, const ChannelModel& ch, std::size_t n,
                                      const Density& law, std::size_t samples, RandomStream rng) {
  return upper_bound_random(Objective(f, ch, QuadratureSpec::defaults_for(f.dim())), n, law,
                            samples, rng);
}

double upper_bound_random_exact(const Objective& objective, std::size_t n, const Density& law) {
  if (law.dim() != objective.dim())
    throw std::invalid_argument("upper_bound_random_exact: placement law dimension mismatch");
  // s(x, u) depends on |x - u| only, so E_U[s(x, U)] is the single-UAV
  // success of a UAV at x under the law.
  const Objective over_law(law, objective.channel(), objective.quadrature());
  return objective.expectation([&](const Point& x) {
    const double miss = std::clamp(1.0 - over_law.single_success(x), 0.0, 1.0);
    return std::pow(miss, double(n));
  });
}

double lower_bound_altitude(double lambda, double h, double r, std::size_t n) {
  if (!(h >= 0.0)) throw std::invalid_argument("lower_bound_altitude: h must be >= 0");
  if (!(lambda > 0.0) || !(r > 0.0))
    throw std::invalid_argument("lower_bound_altitude: lambda and r must be > 0");
  return std::pow(-std::expm1(-lambda * std::pow(h, r)), double(n));
}

double lower_bound_ground_uniform(double r, std::size_t n) {
  if (!(r > 1.0)) throw std::invalid_argument("lower_bound_ground_uniform: r must be > 1");
  return std::pow(-std::expm1(-std::pow(3.0, -r)), double(n)) / 3.0;
}

ClosedForm closed_form_gaussian(std::size_t n, double h, double sigma, double window) {
  if (!(sigma > 0.0)) throw std::invalid_argument("closed_form_gaussian: sigma must be > 0");
  if (!(window > 0.0)) throw std::invalid_argument("closed_form_gaussian: window must be > 0");
  if (!(h >= 0.0)) throw std::invalid_argument("closed_form_gaussian: h must be >= 0");
  const double s2 = sigma * sigma;
  CompensatedSum sum;
  if (n <= kMaxAlternatingTerms) {
    for (std::size_t k = 0; k <= n; ++k) {
      const double a = 1.0 + 2.0 * double(k) * s2;
      const double mass = std::isinf(window) ? 1.0 : std::erf(window * std::sqrt(a / (2.0 * s2)));
      const double sign = k % 2 == 0 ? 1.0 : -1.0;
      sum.add(sign * binomial(n, k) * std::exp(-double(k) * h * h) / std::sqrt(a) * mass);
    }
    if (!cancelled(sum, n)) return {sum.value(), false};
  }
  std::fprintf(stderr, "warning: closed_form_gaussian n=%zu: alternating sum replaced by quadrature\n",
               n);
  return {gaussian_by_quadrature(n, h, sigma, window), true};
}

ClosedForm closed_form_uniform_square(std::size_t n, double h, double half_side) {
  if (!(half_side > 0.0)) throw std::invalid_argument("closed_form_uniform_square: half_side must be > 0");
  if (!(h >= 0.0)) throw std::invalid_argument("closed_form_uniform_square: h must be >= 0");
  CompensatedSum sum;
  if (n <= kMaxAlternatingTerms) {
    sum.add(1.0);
    for (std::size_t k = 1; k <= n; ++k) {
      const double kk = double(k);
      const double e = std::erf(half_side * std::sqrt(kk));
      const double sign = k % 2 == 0 ? 1.0 : -1.0;
      sum.add(sign * binomial(n, k) * std::exp(-kk * h * h) * std::numbers::pi * e * e /
              (4.0 * kk * half_side * half_side));
    }
    if (!cancelled(sum, n)) return {sum.value(), false};
  }
  std::fprintf(stderr,
               "warning: closed_form_uniform_square n=%zu: alternating sum replaced by quadrature\n", n);
  return {square_by_quadrature(n, h, half_side), true};
}

AsymptoticOptimum asymptotic_optimum(const Objective& objective, std::size_t n) {
  AsymptoticOptimum out;
  const Density& f = objective.density();
  if (f.is_unimodal() && f.center()) {
    out.u_star = *f.center();
  } else {
    const Box box = objective.search_box();
    const int d = objective.dim();
    const std::size_t per_axis = d == 1 ? 64 : 16;
    struct Candidate {
      Point u;
      double value;
    };
    std::vector<Candidate> grid;
    for (std::size_t i = 0; i < per_axis; ++i)
      for (std::size_t j = 0; j < (d == 1 ? 1 : per_axis); ++j) {
        const double x = box.lo[0] + box.extent(0) * (double(i) + 0.5) / double(per_axis);
        Point u(x);
        if (d == 2) u = Point(x, box.lo[1] + box.extent(1) * (double(j) + 0.5) / double(per_axis));
        grid.push_back({u, objective.single_success(u)});
      }
    std::stable_sort(grid.begin(), grid.end(),
                     [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    const std::size_t starts = std::min<std::size_t>(4, grid.size());
    const double floor = 1e-10 * objective.length_scale();
    Candidate best = grid.front();
    for (std::size_t s = 0; s < starts; ++s) {
      Candidate cur = grid[s];
      std::array<double, 2> step{box.extent(0) / double(per_axis),
                                 d == 2 ? box.extent(1) / double(per_axis) : 0.0};
      std::size_t iters = 0;
      while (std::max(step[0], step[1]) > floor) {
        if (++iters > 20000) {
          char msg[160];
          std::snprintf(msg, sizeof msg,
                        "asymptotic_optimum: pattern search did not settle; best iterate (%.12g, %.12g)",
                        best.u[0], best.u[1]);
          throw std::runtime_error(msg);
        }
        bool moved = false;
        for (int a = 0; a < d && !moved; ++a)
          for (double sign : {1.0, -1.0}) {
            Point trial = cur.u;
            trial[a] += sign * step[std::size_t(a)];
            trial = box.clamp(trial);
            const double v = objective.single_success(trial);
            if (v > cur.value) {
              cur = {trial, v};
              moved = true;
              break;
            }
          }
        if (!moved) {
          step[0] *= 0.5;
          step[1] *= 0.5;
        }
      }
      if (cur.value > best.value) best = cur;
    }
    out.u_star = best.u;
  }
  out.single_success = objective.single_success(out.u_star);
  out.predicted_one_minus_outage = double(n) * out.single_success;
  return out;
}

MarcumBound marcum_upper_bound(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw std::invalid_argument("marcum_upper_bound requires a, b >= 0");
  MarcumBound out;
  out.value = std::exp(-0.5 * b * b + a * b);
  out.clipped = out.value > 1.0;
  out.reported = std::min(out.value, 1.0);
  return out;
}

bool BoundReport::consistent(double tol, double sigmas) const {
  return lower <= achieved + tol && achieved <= upper + sigmas * upper_standard_error + tol;
}

BoundReport bound_report(const Objective& objective, std::size_t n, double achieved,
                         const Density& law, std::size_t samples, RandomStream rng) {
  const auto* ray = std::get_if<RayleighParams>(&objective.channel());
  if (!ray) throw std::invalid_argument("bound_report: Rayleigh channel required");
  BoundReport rep;
  rep.achieved = achieved;
  rep.witnesses.push_back("achieved: outage of the evaluated deployment");
  rep.lower = lower_bound_altitude(ray->lambda, ray->altitude, ray->path_loss_exponent, n);
  rep.witnesses.push_back("lower: altitude bound (1 - exp(-lambda h^r))^n");
  const auto* uni = std::get_if<density_kind::Uniform1D>(&objective.density().kind());
  if (ray->altitude == 0.0 && ray->lambda == 1.0 && ray->path_loss_exponent > 1.0 && uni &&
      uni->b - uni->a == 1.0) {
    const double ground = lower_bound_ground_uniform(ray->path_loss_exponent, n);
    if (ground > rep.lower) {
      rep.lower = ground;
      rep.witnesses.back() = "lower: ground bound (1/3)(1 - exp(-3^-r))^n";
    }
  }
  const MonteCarloEstimate up = upper_bound_random(objective, n, law, samples, rng);
  rep.upper = up.value;
  rep.upper_standard_error = up.standard_error;
  rep.witnesses.push_back("upper: random deployment bound, law " + law.kind_name() + ", " +
                          std::to_string(samples) + " samples");
  return rep;
}

}  // namespace uavplace::analysis
