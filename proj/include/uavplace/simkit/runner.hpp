// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "uavplace/optimizers.hpp"
#include "uavplace/simkit/artifacts.hpp"
#include "uavplace/simkit/config.hpp"

namespace uavplace::simkit {

/// One optimizer run of a sweep.
struct Job {
  std::size_t n = 0;
  std::size_t altitude_index = 0;
  double altitude = 0.0;
  std::size_t optimizer_index = 0;
  std::size_t restart = 0;

  std::string name() const;  // stable file stem, e.g. "gd-inf-10_n4_h0_r3"
};

struct JobResult {
  Job job;
  std::string label;
  RunRecord record;
  std::string error;  // non-empty when the run threw
};

/// Streams one line per iteration; calls are serialised across jobs.
using JobProgressFn = std::function<void(const Job&, const OptimizerSpec&, const IterationRecord&)>;

struct RunOptions {
  std::size_t jobs = 1;  // worker threads; results do not depend on it
  JobProgressFn progress;
};

/// Runs `count` independent tasks on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task);

/// Uniform law over the density's support box; GD restarts draw from it.
Density init_law(const Density& f);

/// Seeds derived from the spec seed and the job coordinates. GD restarts with
/// the same (n, altitude, restart) share their initial deployment across
/// optimizer entries, so variants are compared on common draws.
std::uint64_t pso_seed(std::uint64_t seed, const Job& job);
Deployment gd_initial(const ExperimentSpec& spec, const OptimizerSpec& opt, const Job& job);

/// Every job of the spec, in a fixed order.
std::vector<Job> enumerate_jobs(const ExperimentSpec& spec);
/// Executes the jobs. Failures are captured per job, never thrown.
std::vector<JobResult> execute(const ExperimentSpec& spec, const RunOptions& options = {});

struct RunSummary {
  std::vector<JobResult> results;
  std::filesystem::path csv;
  bool complete = true;
};

/// Executes the spec and writes <name>.csv, one runs/<job>.json per run and
/// manifest.json into spec.output_dir. A failed run leaves the artifacts
/// flagged incomplete.
RunSummary run(const ExperimentSpec& spec, const RunOptions& options = {});

/// The canonical config recorded for a spec (the validated source document).
Json spec_config(const ExperimentSpec& spec);

}  // namespace uavplace::simkit
