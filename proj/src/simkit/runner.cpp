// SPDX-License-Identifier: Apache-2.0
#include "uavplace/simkit/runner.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace uavplace::simkit {

namespace {

constexpr std::uint64_t kTagRunPso = 11;
constexpr std::uint64_t kTagRunInit = 12;

std::string slug(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_';
    out += keep ? c : '-';
  }
  return out.empty() ? "run" : out;
}

std::string joined(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += format_number(xs[i]);
  }
  return out;
}

Json trace_json(const RunRecord& r) {
  Json objective = Json::array(), gnorm = Json::array(), eta = Json::array();
  for (const auto& it : r.trace) {
    objective.push_back(it.objective);
    if (r.algorithm == "gd") {
      gnorm.push_back(it.gradient_norm);
      eta.push_back(it.eta);
    }
  }
  Json t = {{"objective", objective}};
  if (r.algorithm == "gd") {
    t["gradient_norm"] = gnorm;
    t["eta"] = eta;
  }
  return t;
}

}  // namespace

std::string Job::name() const {
  return "n" + std::to_string(n) + "_h" + std::to_string(altitude_index) + "_r" +
         std::to_string(restart);
}

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& task) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(jobs, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Density init_law(const Density& f) {
  const Box b = f.support_bounds();
  return b.dim == 1 ? Density::uniform1d(b.lo[0], b.hi[0])
                    : Density::uniform_box2d(b.lo[0], b.hi[0], b.lo[1], b.hi[1]);
}

std::uint64_t pso_seed(std::uint64_t seed, const Job& job) {
  RandomStream s(seed, {kTagRunPso, job.n, job.altitude_index, job.optimizer_index, job.restart});
  return s.next_u64();
}

Deployment gd_initial(const ExperimentSpec& spec, const OptimizerSpec& opt, const Job& job) {
  const int d = spec.density.dim();
  if (!opt.init.empty()) return Deployment::unflatten(opt.init, d);
  RandomStream rng(spec.seed, {kTagRunInit, job.n, job.altitude_index, job.restart});
  return random_deployment(init_law(spec.density), job.n, rng);
}

std::vector<Job> enumerate_jobs(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  for (std::size_t hi = 0; hi < spec.altitudes.size(); ++hi)
    for (std::size_t n : spec.n_values)
      for (std::size_t oi = 0; oi < spec.optimizers.size(); ++oi) {
        const auto& opt = spec.optimizers[oi];
        const std::size_t restarts = opt.algorithm == "gd" ? opt.restarts : 1;
        for (std::size_t r = 0; r < restarts; ++r)
          jobs.push_back({n, hi, spec.altitudes[hi], oi, r});
      }
  return jobs;
}

std::vector<JobResult> execute(const ExperimentSpec& spec, const RunOptions& options) {
  std::vector<Objective> objectives;
  for (double h : spec.altitudes)
    objectives.emplace_back(spec.density, with_altitude(spec.channel, h), spec.quadrature);
  const std::vector<Job> jobs = enumerate_jobs(spec);
  std::vector<JobResult> results(jobs.size());
  std::mutex progress_mutex;
  const std::string hash = config_hash(spec_config(spec));

  parallel_for(jobs.size(), options.jobs, [&](std::size_t k) {
    const Job& job = jobs[k];
    const OptimizerSpec& opt = spec.optimizers[job.optimizer_index];
    JobResult& out = results[k];
    out.job = job;
    out.label = opt.label;
    ProgressFn progress;
    if (options.progress)
      progress = [&](const IterationRecord& it) {
        std::lock_guard lock(progress_mutex);
        options.progress(job, opt, it);
      };
    const Objective& objective = objectives[job.altitude_index];
    try {
      if (opt.algorithm == "pso") {
        PsoConfig cfg = opt.pso;
        cfg.seed = pso_seed(spec.seed, job);
        out.record = pso_optimize(cfg, objective, job.n, progress);
      } else {
        GdConfig cfg = opt.gd;
        cfg.seed = spec.seed;
        out.record = gd_distributed(cfg, objective, gd_initial(spec, opt, job), progress);
      }
    } catch (const std::exception& e) {
      out.error = e.what();
      out.record.algorithm = opt.algorithm;
      out.record.completed = false;
      out.record.termination = std::string("error: ") + e.what();
    }
    out.record.provenance.config_hash = hash;
    out.record.provenance.seed = spec.seed;
    out.record.provenance.quadrature = spec.quadrature.describe();
  });
  return results;
}

Json spec_config(const ExperimentSpec& spec) { return spec.source; }

RunSummary run(const ExperimentSpec& spec, const RunOptions& options) {
  RunSummary summary;
  summary.results = execute(spec, options);
  Stamp stamp{"sweep " + spec.name, spec_config(spec), spec.seed, true};
  for (const auto& r : summary.results)
    if (!r.record.completed) stamp.complete = false;
  ArtifactStore store(spec.output_dir, stamp);

  CsvTable table;
  table.columns = {"n",          "h",        "label",       "algorithm",   "restart",
                   "outage",     "converged", "completed",  "termination", "evaluations",
                   "iterations", "deployment"};
  for (const auto& r : summary.results) {
    const RunRecord& rec = r.record;
    table.add({std::to_string(r.job.n), format_number(r.job.altitude), r.label, rec.algorithm,
               std::to_string(r.job.restart), format_number(rec.final_objective),
               rec.converged ? "1" : "0", rec.completed ? "1" : "0", rec.termination,
               std::to_string(rec.evaluations),
               std::to_string(rec.trace.empty() ? 0 : rec.trace.size() - 1),
               joined(rec.final_deployment.canonical().flatten())});
  }
  summary.csv = store.write_csv(slug(spec.name) + ".csv", table);

  std::map<std::string, std::size_t> used;
  for (const auto& r : summary.results) {
    const RunRecord& rec = r.record;
    std::string stem = slug(r.label) + "_" + r.job.name();
    if (used[stem]++) stem += "_" + std::to_string(used[stem]);
    Json body = {{"label", r.label},
                 {"algorithm", rec.algorithm},
                 {"n", r.job.n},
                 {"altitude", r.job.altitude},
                 {"restart", r.job.restart},
                 {"final_objective", rec.final_objective},
                 {"final_deployment", rec.final_deployment.flatten()},
                 {"evaluations", rec.evaluations},
                 {"converged", rec.converged},
                 {"complete", rec.completed},
                 {"termination", rec.termination},
                 {"quadrature", rec.provenance.quadrature},
                 {"trace", trace_json(rec)}};
    store.write_json("runs/" + stem + ".json", body);
  }
  store.write_manifest();
  summary.complete = stamp.complete;
  return summary;
}

}  // namespace uavplace::simkit
