// SPDX-License-Identifier: Apache-2.0
#include "uavplace/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace uavplace {

namespace {

// Stream tags; the (particle, iteration) pair is appended.
constexpr std::uint64_t kTagPsoInit = 1;
constexpr std::uint64_t kTagPsoStep = 2;

constexpr double kMaxMove = 0.1;

// Per-coordinate bounds of a flattened deployment.
struct FlatBox {
  std::vector<double> lo, hi;
};

FlatBox replicate(const Box& box, std::size_t n) {
  FlatBox out;
  for (std::size_t i = 0; i < n; ++i)
    for (int a = 0; a < box.dim; ++a) {
      out.lo.push_back(box.lo[std::size_t(a)]);
      out.hi.push_back(box.hi[std::size_t(a)]);
    }
  return out;
}

}  // namespace

void PsoConfig::validate() const {
  if (particles == 0) throw std::invalid_argument("pso: particles must be >= 1");
  if (iterations == 0) throw std::invalid_argument("pso: iterations must be >= 1");
  if (!(inertia_start >= inertia_end)) throw std::invalid_argument("pso: inertia must not increase");
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw std::invalid_argument("pso: c1, c2 must be >= 0");
  if (!(velocity_clamp > 0.0 && velocity_clamp <= 1.0))
    throw std::invalid_argument("pso: velocity_clamp must be in (0, 1]");
}

void GdConfig::validate() const {
  if (iterations == 0) throw std::invalid_argument("gd: iterations must be >= 1");
  if (!(eta0 >= 0.0) || !std::isfinite(eta0)) throw std::invalid_argument("gd: eta0 must be >= 0");
  if (!(sensing_radius > 0.0)) throw std::invalid_argument("gd: sensing radius must be > 0");
  if (!(comm_radius > 0.0)) throw std::invalid_argument("gd: communication radius must be > 0");
  if (!(grad_tol >= 0.0)) throw std::invalid_argument("gd: grad_tol must be >= 0");
  if (!(eta_growth_limit >= 1.0)) throw std::invalid_argument("gd: eta_growth_limit must be >= 1");
}

std::string policy_name(EtaPolicy p) {
  switch (p) {
    case EtaPolicy::constant:
      return "constant";
    case EtaPolicy::step_halving:
      return "step_halving";
    case EtaPolicy::adaptive:
      return "adaptive";
  }
  return "unknown";
}

EtaPolicy parse_policy(const std::string& name) {
  if (name == "constant") return EtaPolicy::constant;
  if (name == "step_halving") return EtaPolicy::step_halving;
  if (name == "adaptive") return EtaPolicy::adaptive;
  throw std::invalid_argument("unknown eta policy: " + name);
}

std::string progress_json(const std::string& algorithm, const IterationRecord& rec) {
  nlohmann::json j;
  j["algorithm"] = algorithm;
  j["iteration"] = rec.iteration;
  j["objective"] = rec.objective;
  if (algorithm == "gd") {
    j["gradient_norm"] = rec.gradient_norm;
    j["eta"] = rec.eta;
  }
  j["positions"] = rec.positions;
  return j.dump();
}

Deployment random_deployment(const Density& law, std::size_t n, RandomStream& rng) {
  if (n == 0) throw std::invalid_argument("random_deployment: n must be >= 1");
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(law.sample(rng));
  return Deployment(std::move(pts));
}

RunRecord pso_optimize(const PsoConfig& cfg, const Objective& objective, std::size_t n,
                       const ProgressFn& progress) {
  cfg.validate();
  if (n == 0) throw std::invalid_argument("pso: n must be >= 1");
  const int d = objective.dim();
  const Box box = cfg.search_box.value_or(objective.search_box());
  if (box.dim != d) throw std::invalid_argument("pso: search box dimension mismatch");
  const FlatBox fb = replicate(box, n);
  const std::size_t D = fb.lo.size();
  std::vector<double> vmax(D);
  for (std::size_t k = 0; k < D; ++k) vmax[k] = cfg.velocity_clamp * (fb.hi[k] - fb.lo[k]);

  RunRecord rec;
  rec.algorithm = "pso";
  rec.provenance.seed = cfg.seed;
  rec.provenance.quadrature = objective.quadrature().describe();

  const std::size_t N = cfg.particles;
  std::vector<std::vector<double>> pos(N, std::vector<double>(D)), vel = pos, best = pos;
  std::vector<double> best_val(N);
  auto evaluate = [&](const std::vector<double>& x) {
    ++rec.evaluations;
    return objective.outage(Deployment::unflatten(x, d));
  };
  auto argmin = [&] {
    std::size_t g = 0;
    for (std::size_t i = 1; i < N; ++i)
      if (best_val[i] < best_val[g]) g = i;
    return g;
  };
  auto record = [&](std::size_t t, std::size_t g) {
    IterationRecord it;
    it.iteration = t;
    it.positions = best[g];
    it.objective = best_val[g];
    if (progress) progress(it);
    rec.trace.push_back(std::move(it));
  };

  std::size_t g = 0;
  try {
    for (std::size_t i = 0; i < N; ++i) {
      RandomStream rng(cfg.seed, {kTagPsoInit, i});
      for (std::size_t k = 0; k < D; ++k) pos[i][k] = rng.uniform(fb.lo[k], fb.hi[k]);
      for (std::size_t k = 0; k < D; ++k) vel[i][k] = rng.uniform(-vmax[k], vmax[k]);
      best[i] = pos[i];
      best_val[i] = evaluate(pos[i]);
    }
    g = argmin();
    record(0, g);

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
      const double frac = cfg.iterations > 1 ? double(t - 1) / double(cfg.iterations - 1) : 0.0;
      const double omega = cfg.inertia_start + (cfg.inertia_end - cfg.inertia_start) * frac;
      const std::vector<double> gb = best[g];
      for (std::size_t i = 0; i < N; ++i) {
        RandomStream rng(cfg.seed, {kTagPsoStep, i, t});
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        for (std::size_t k = 0; k < D; ++k) {
          double v = omega * vel[i][k] + cfg.c1 * r1 * (best[i][k] - pos[i][k]) +
                     cfg.c2 * r2 * (gb[k] - pos[i][k]);
          v = std::clamp(v, -vmax[k], vmax[k]);
          double x = pos[i][k] + v;
          if (x < fb.lo[k] || x > fb.hi[k]) {
            x = std::clamp(x, fb.lo[k], fb.hi[k]);
            v = 0.0;
          }
          vel[i][k] = v;
          pos[i][k] = x;
        }
        const double val = evaluate(pos[i]);
        if (val < best_val[i]) {
          best_val[i] = val;
          best[i] = pos[i];
        }
      }
      g = argmin();
      record(t, g);
    }
    rec.termination = "max_iterations";
  } catch (const std::exception& e) {
    rec.completed = false;
    rec.termination = std::string("evaluation failed: ") + e.what();
    if (rec.trace.empty()) throw;
  }
  const auto& last = rec.trace.back();
  rec.final_deployment = Deployment::unflatten(last.positions, d).canonical();
  rec.final_objective = last.objective;
  return rec;
}

RunRecord pso_optimize(const PsoConfig& cfg, const Density& f, const ChannelModel& ch,
                       const QuadratureSpec& q, std::size_t n, const ProgressFn& progress) {
  return pso_optimize(cfg, Objective(f, ch, q), n, progress);
}

RunRecord gd_distributed(const GdConfig& cfg, const Objective& objective, const Deployment& init,
                         const ProgressFn& progress) {
  cfg.validate();
  const int d = objective.dim();
  if (init.size() == 0 || init.dim() != d)
    throw std::invalid_argument("gd: initial deployment does not match the density dimension");
  const Box box = cfg.search_box.value_or(objective.search_box());
  const double L = objective.length_scale();
  const std::size_t n = init.size();
  const bool full_view = std::isinf(cfg.sensing_radius) && std::isinf(cfg.comm_radius);

  RunRecord rec;
  rec.algorithm = "gd";
  rec.provenance.seed = cfg.seed;
  rec.provenance.quadrature = objective.quadrature().describe();

  std::vector<Point> U = init.positions();
  for (auto& u : U) u = box.clamp(u);

  auto terms_at = [&](const std::vector<Point>& at) {
    ++rec.evaluations;
    return objective.local_terms_all(Deployment(at), cfg.sensing_radius, cfg.comm_radius);
  };
  auto global_value = [&](const std::vector<Point>& at, const std::vector<LocalTerms>& terms) {
    if (full_view) return std::clamp(terms.front().local_objective, 0.0, 1.0);
    ++rec.evaluations;
    return objective.outage(Deployment(at));
  };
  auto norm_of = [](const std::vector<LocalTerms>& terms) {
    double m = 0.0;
    for (const auto& t : terms) m = std::max(m, std::hypot(t.gradient.c[0], t.gradient.c[1]));
    return m;
  };
  auto relative_slope = [](const LocalTerms& t) {
    return std::hypot(t.gradient.c[0], t.gradient.c[1]) / std::max(t.local_objective, 1e-300);
  };
  auto max_relative_slope = [&](const std::vector<LocalTerms>& terms) {
    double m = 0.0;
    for (const auto& t : terms) m = std::max(m, relative_slope(t));
    return m;
  };
  std::vector<double> eta(n, cfg.eta0);
  auto record = [&](std::size_t t, double obj, double gnorm) {
    IterationRecord it;
    it.iteration = t;
    it.positions = Deployment(U).flatten();
    it.objective = obj;
    it.gradient_norm = gnorm;
    it.eta = *std::max_element(eta.begin(), eta.end());
    if (progress) progress(it);
    rec.trace.push_back(std::move(it));
  };

  try {
    std::vector<LocalTerms> terms = terms_at(U);
    double current = global_value(U, terms);
    if (cfg.eta0 == 0.0) {
      // Every UAV starts from the same agreed step, set by the exact gradient.
      ++rec.evaluations;
      double value = 0.0;
      double g0 = 0.0;
      for (const auto& g : objective.gradient_and_outage(Deployment(U), value))
        g0 = std::max(g0, std::hypot(g.c[0], g.c[1]));
      std::fill(eta.begin(), eta.end(), g0 > 0.0 ? 0.1 * L / g0 : 0.1 * L);
    }
    const double eta_cap = cfg.eta_growth_limit * eta.front();
    double gnorm = norm_of(terms);
    record(0, current, gnorm);
    std::vector<int> increases(n, 0);
    std::vector<double> start_level(n);
    for (std::size_t i = 0; i < n; ++i) start_level[i] = terms[i].local_objective;
    std::vector<double> level = start_level;
    rec.termination = "max_iterations";

    // UAV i tests its proposed position on its own view: the disk around its
    // current position and its current neighbours, everyone else held still.
    // Returns the position it moves to.
    auto neighbours_of = [&](std::size_t i, const std::vector<Point>& at) {
      std::vector<std::size_t> out;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && distance(at[i], at[j]) <= cfg.comm_radius) out.push_back(j);
      return out;
    };
    std::vector<std::vector<std::size_t>> seen(n);
    for (std::size_t i = 0; i < n; ++i) seen[i] = neighbours_of(i, U);

    double max_proposed = 0.0;
    auto step_one = [&](std::size_t i, const LocalTerms& ti, const std::vector<Point>& at) {
      const double gi = std::hypot(ti.gradient.c[0], ti.gradient.c[1]);
      if (gi == 0.0) return at[i];
      if (eta[i] * gi > kMaxMove * L) eta[i] = kMaxMove * L / gi;
      Point next = at[i];
      for (int a = 0; a < d; ++a) next[a] -= eta[i] * ti.gradient[a];
      next = box.clamp(next);
      const double step = distance(next, at[i]);
      max_proposed = std::max(max_proposed, step);
      if (step == 0.0) return at[i];
      const std::vector<std::size_t> neighbours = neighbours_of(i, at);
      std::vector<Point> trial = at;
      trial[i] = next;
      ++rec.evaluations;
      const double after =
          objective.local_objective_at(i, Deployment(trial), at[i], cfg.sensing_radius, neighbours);
      if (after < ti.local_objective) {
        increases[i] = 0;
        if (cfg.policy == EtaPolicy::adaptive) {
          // The cap follows the UAV's own objective level, so steps keep pace
          // as the gradient shrinks with the outage.
          const double ratio = std::max(1.0, start_level[i] / std::max(ti.local_objective, 1e-300));
          eta[i] = std::min(1.2 * eta[i], eta_cap * ratio);
        }
        return next;
      }
      ++increases[i];
      if (cfg.policy == EtaPolicy::constant) {
        if (increases[i] >= 10) {
          eta[i] *= 0.5;
          increases[i] = 0;
        }
        return next;
      }
      eta[i] *= 0.5;
      return at[i];
    };

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
      if (max_relative_slope(terms) * L <= cfg.grad_tol && gnorm <= 1e-4 * L) {
        rec.converged = true;
        rec.termination = "gradient_tolerance";
        break;
      }
      max_proposed = 0.0;
      if (cfg.sequential) {
        // UAV i sees the already-moved positions of UAVs 0..i-1.
        for (std::size_t i = 0; i < n; ++i) {
          ++rec.evaluations;
          const LocalTerms now =
              objective.local_terms(i, Deployment(U), cfg.sensing_radius, cfg.comm_radius);
          U[i] = step_one(i, now, U);
        }
      } else {
        std::vector<Point> next(n);
        for (std::size_t i = 0; i < n; ++i) next[i] = step_one(i, terms[i], U);
        const std::vector<Point> before = std::exchange(U, std::move(next));
        const std::vector<LocalTerms> after = terms_at(U);
        // Moves that each helped alone can still overshoot together. A UAV
        // whose gradient reverses after a move halves its step.
        for (std::size_t i = 0; i < n; ++i) {
          if (U[i] == before[i]) continue;
          double dot = 0.0;
          for (int a = 0; a < d; ++a) dot += after[i].gradient[a] * terms[i].gradient[a];
          if (dot < 0.0) eta[i] *= 0.5;
        }
        terms = after;
      }
      if (cfg.sequential) terms = terms_at(U);
      // A new neighbour set rescales the local objective and its gradient
      // together; rescale eta_i with it so the step length carries over.
      bool rescaled = false;
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> nb = neighbours_of(i, U);
        if (nb == seen[i]) continue;
        rescaled = true;
        if (level[i] > 0.0 && terms[i].local_objective > 0.0)
          eta[i] *= level[i] / terms[i].local_objective;
        seen[i] = std::move(nb);
      }
      for (std::size_t i = 0; i < n; ++i) level[i] = terms[i].local_objective;
      current = global_value(U, terms);
      gnorm = norm_of(terms);
      record(t, current, gnorm);
      if (max_proposed < 1e-9 * L && !rescaled) {
        rec.termination = "stalled";
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.completed = false;
    rec.termination = std::string("evaluation failed: ") + e.what();
    if (rec.trace.empty()) throw;
  }
  const auto& last = rec.trace.back();
  rec.final_deployment = Deployment::unflatten(last.positions, d);
  rec.final_objective = last.objective;
  return rec;
}

RunRecord gd_distributed(const GdConfig& cfg, const Density& f, const ChannelModel& ch,
                         const QuadratureSpec& q, const Deployment& init,
                         const ProgressFn& progress) {
  return gd_distributed(cfg, Objective(f, ch, q), init, progress);
}

}  // namespace uavplace
