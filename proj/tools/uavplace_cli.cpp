// SPDX-License-Identifier: Apache-2.0
// uavplace: command-line front end for the outage library.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavplace/analysis.hpp"
#include "uavplace/kernels.hpp"
#include "uavplace/simkit/artifacts.hpp"
#include "uavplace/simkit/figures.hpp"
#include "uavplace/simkit/runner.hpp"
#include "uavplace/special_functions.hpp"

using namespace uavplace;
using namespace uavplace::simkit;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string quadrature;
  bool progress = false;
  std::size_t jobs = 1;
};

void add_common(CLI::App* app, Common& c, bool needs_config) {
  auto* opt = app->add_option("--config", c.config, "JSON configuration document");
  if (needs_config) opt->required();
  app->add_option("--seed", c.seed, "Override the document seed");
  app->add_option("--out", c.out, "Output directory (overrides output_dir)");
  app->add_option("--quadrature", c.quadrature,
                  "Quadrature method name or JSON object (overrides the document)");
  app->add_flag("--progress", c.progress, "Stream per-iteration JSON lines to stderr");
  app->add_option("--jobs", c.jobs, "Worker threads for independent runs")->check(CLI::PositiveNumber);
}

Json load_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw SpecError({path + ": " + e.what()});
  }
}

Json quadrature_override(const std::string& text) {
  if (!text.empty() && text.front() == '{') return Json::parse(text);
  return Json{{"method", text}};
}

// Flag values replace document fields; the result is what gets hashed.
Json apply_common(Json doc, const Common& c) {
  if (c.seed) doc["seed"] = *c.seed;
  if (!c.out.empty()) doc["output_dir"] = c.out;
  if (!c.quadrature.empty()) doc["quadrature"] = quadrature_override(c.quadrature);
  return doc;
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

JobProgressFn progress_printer(bool enabled) {
  if (!enabled) return {};
  return [](const Job& job, const OptimizerSpec& opt, const IterationRecord& it) {
    Json line = Json::parse(progress_json(opt.algorithm, it));
    line["job"] = opt.label + "_" + job.name();
    std::cerr << line.dump() << '\n';
  };
}

int print_summary(const RunSummary& s) {
  for (const auto& r : s.results)
    std::cout << Json{{"label", r.label},
                      {"n", r.job.n},
                      {"altitude", r.job.altitude},
                      {"restart", r.job.restart},
                      {"outage", r.record.final_objective},
                      {"termination", r.record.termination}}
                     .dump()
              << '\n';
  std::cout << "wrote " << s.csv.string() << (s.complete ? "" : " (incomplete)") << '\n';
  return s.complete ? 0 : 1;
}

int cmd_evaluate(const Common& c, const std::string& deployment) {
  Json doc = apply_common(load_json(c.config), c);
  const ModelSpec m = parse_model(doc);
  const Deployment U = Deployment::unflatten(parse_numbers(deployment), m.density.dim());
  const Objective obj(m.density, m.channel, m.quadrature);
  const OutageEstimate est = obj.outage_with_error(U);
  std::vector<double> grad;
  for (const auto& g : obj.gradient(U))
    for (int a = 0; a < g.dim; ++a) grad.push_back(g[a]);
  std::cout << Json{{"outage", est.value}, {"error", est.error}, {"gradient", grad}}.dump() << '\n';
  if (!c.out.empty()) {
    doc["deployment"] = U.flatten();
    ArtifactStore store(c.out, Stamp{"evaluate", doc, m.seed, true});
    CsvTable t;
    t.columns = {"uav", "x", "y", "gradient_x", "gradient_y"};
    const auto g = obj.gradient(U);
    for (std::size_t i = 0; i < U.size(); ++i)
      t.add({std::to_string(i + 1), format_number(U[i][0]), format_number(U[i][1]),
             format_number(g[i][0]), format_number(g[i][1])});
    t.add({"outage", format_number(est.value), "", format_number(est.error), ""});
    store.write_csv("evaluate.csv", t);
    store.write_manifest();
  }
  return 0;
}

int cmd_bounds(const Common& c, std::size_t n, std::optional<double> achieved, std::size_t samples) {
  Json doc = apply_common(load_json(c.config), c);
  const ModelSpec m = parse_model(doc);
  const Objective obj(m.density, m.channel, m.quadrature);
  if (!achieved) {
    PsoConfig cfg;
    cfg.seed = m.seed;
    achieved = pso_optimize(cfg, obj, n).final_objective;
  }
  const Density law = init_law(m.density);
  const auto rep = analysis::bound_report(obj, n, *achieved, law, samples, RandomStream(m.seed, {31, n}));
  const Json body = {{"n", n},
                     {"lower", rep.lower},
                     {"upper", rep.upper},
                     {"upper_standard_error", rep.upper_standard_error},
                     {"achieved", rep.achieved},
                     {"consistent", rep.consistent(1e-9)},
                     {"witnesses", rep.witnesses}};
  std::cout << body.dump(2) << '\n';
  if (!c.out.empty()) {
    doc["n"] = n;
    doc["achieved"] = *achieved;
    doc["samples"] = samples;
    ArtifactStore store(c.out, Stamp{"bounds", doc, m.seed, true});
    CsvTable t;
    t.columns = {"n", "lower", "achieved", "upper", "upper_standard_error"};
    t.add({std::to_string(n), format_number(rep.lower), format_number(rep.achieved),
           format_number(rep.upper), format_number(rep.upper_standard_error)});
    store.write_csv("bounds.csv", t);
    store.write_json("bounds.json", body);
    store.write_manifest();
  }
  return 0;
}

struct OptimizeArgs {
  std::string algorithm;
  std::optional<std::size_t> n;
  std::optional<std::size_t> iterations, particles, restarts;
  std::string init, policy, ds, dc;
};

int cmd_optimize(const Common& c, const OptimizeArgs& a) {
  Json doc = apply_common(load_json(c.config), c);
  Json entry = {{"algorithm", a.algorithm}, {"label", a.algorithm}};
  if (doc.contains("optimizers") && doc["optimizers"].is_array())
    for (const auto& o : doc["optimizers"])
      if (o.is_object() && o.value("algorithm", "") == a.algorithm) {
        entry = o;
        break;
      }
  if (a.iterations) entry["iterations"] = *a.iterations;
  if (a.particles) entry["particles"] = *a.particles;
  if (a.restarts) entry["restarts"] = *a.restarts;
  if (!a.policy.empty()) entry["policy"] = a.policy;
  auto radius = [](const std::string& s) { return s == "inf" ? Json("inf") : Json(std::stod(s)); };
  if (!a.ds.empty()) entry["sensing_radius"] = radius(a.ds);
  if (!a.dc.empty()) entry["comm_radius"] = radius(a.dc);
  if (!a.init.empty()) entry["init"] = parse_numbers(a.init);
  doc["optimizers"] = Json::array({entry});
  if (a.n) {
    doc.erase("n_values");
    doc["n"] = *a.n;
  }
  if (!doc.contains("name")) doc["name"] = "optimize-" + a.algorithm;
  const ExperimentSpec spec = parse_experiment(doc);
  return print_summary(run(spec, {c.jobs, progress_printer(c.progress)}));
}

int cmd_sweep(const Common& c) {
  const ExperimentSpec spec = parse_experiment(apply_common(load_json(c.config), c));
  return print_summary(run(spec, {c.jobs, progress_printer(c.progress)}));
}

int cmd_figure(const Common& c, const std::string& id, bool print_config) {
  Json config = c.config.empty() ? default_figure_config(id) : load_json(c.config);
  if (print_config) {
    std::cout << config.dump(2) << '\n';
    return 0;
  }
  FigureOptions opts;
  opts.seed = c.seed;
  if (!c.quadrature.empty()) opts.quadrature = quadrature_override(c.quadrature);
  opts.jobs = c.jobs;
  opts.progress = progress_printer(c.progress);
  const FigureDataset fig = compute_figure(id, config, opts);
  const std::string dir = c.out.empty() ? "out/" + id : c.out;
  write_figure(fig, dir);
  std::cout << "wrote " << dir << "/" << id << ".csv, " << id << ".svg"
            << (fig.complete ? "" : " (incomplete)") << '\n';
  return fig.complete ? 0 : 1;
}

int cmd_mc_oracle(const Common& c, const std::string& distances, std::size_t trials) {
  Json doc = apply_common(load_json(c.config), c);
  const ModelSpec m = parse_model(doc);
  doc["distances"] = parse_numbers(distances);
  doc["trials"] = trials;
  CsvTable t;
  t.columns = {"distance", "analytic_success", "mc_success", "standard_error", "z"};
  bool ok = true;
  std::size_t k = 0;
  for (double d : doc["distances"]) {
    const double exact = success_at(d, m.channel);
    const auto mc = simulate_outage_mc(Point(0.0), Point(d), m.channel, trials,
                                       RandomStream(m.seed, {41, k++}));
    const double sim = 1.0 - mc.probability;
    const double z = mc.standard_error > 0 ? (sim - exact) / mc.standard_error : 0.0;
    ok = ok && std::abs(z) <= 3.0;
    t.add({format_number(d), format_number(exact), format_number(sim),
           format_number(mc.standard_error), format_number(z)});
    std::printf("d=%-10g analytic=%.8f mc=%.8f se=%.2e z=%+.2f\n", d, exact, sim, mc.standard_error, z);
  }
  if (!c.out.empty()) {
    ArtifactStore store(c.out, Stamp{"mc-oracle", doc, m.seed, true});
    store.write_csv("mc_oracle.csv", t);
    store.write_manifest();
  }
  std::printf("%s: all distances within 3 standard errors\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_selftest() {
  int failures = 0;
  auto check = [&](const std::string& what, bool ok, const std::string& detail) {
    std::printf("%s %s (%s)\n", ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    if (!ok) ++failures;
  };
  char buf[160];

  std::vector<double> xs(257), ones(257, 1.0);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -2.0 + 4.0 * double(i) / 256.0;
  const kernels::RayleighKernel rk{1.3, 1.5, 0.25};
  const kernels::NodeView nodes{xs, {}};
  std::vector<double> ref = ones, alt = ones;
  kernels::multiply_rayleigh_outage(kernels::Isa::scalar, nodes, Point(0.3), rk, ref);
  kernels::multiply_rayleigh_outage(kernels::active_isa(), nodes, Point(0.3), rk, alt);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(ref[i] - alt[i]));
  std::snprintf(buf, sizeof buf, "isa=%s, max diff %.2e", kernels::isa_name(kernels::active_isa()).c_str(), worst);
  check("kernel variants agree", worst <= 1e-13, buf);

  const double q = special::marcum_q1(0.0, 2.0);
  std::snprintf(buf, sizeof buf, "Q1(0,2)=%.16g", q);
  check("Marcum Q1 at a=0", std::abs(q - std::exp(-2.0)) <= 1e-15, buf);

  const Objective obj(Density::uniform_box2d(0, 1, 0, 1), RayleighParams{1.0, 2.0, 1.0},
                      QuadratureSpec::defaults_for(2));
  const double quad = obj.outage(Deployment::collapsed(Point(0.5, 0.5), 3));
  const double closed = analysis::closed_form_uniform_square(3, 1.0).value;
  std::snprintf(buf, sizeof buf, "quadrature %.12g, closed form %.12g", quad, closed);
  check("closed form vs quadrature", std::abs(quad - closed) <= 1e-9, buf);

  const Objective line(Density::uniform1d(0, 1), RayleighParams{1.0, 2.0, 0.2},
                       QuadratureSpec::defaults_for(1));
  const Deployment U = Deployment::line({0.2, 0.7});
  const double g = line.gradient(U)[0][0];
  const double step = 1e-5;
  const double fd = (line.outage(Deployment::line({0.2 + step, 0.7})) -
                     line.outage(Deployment::line({0.2 - step, 0.7}))) / (2 * step);
  std::snprintf(buf, sizeof buf, "analytic %.10g, central difference %.10g", g, fd);
  check("gradient vs finite difference", std::abs(g - fd) <= 1e-6 * std::max(1.0, std::abs(g)), buf);

  const ChannelModel rician = RicianParams::suburban(0.5, 1.0);
  const auto mc = simulate_outage_mc(Point(0.0), Point(0.7), rician, 200000, RandomStream(7));
  const double exact = outage_at(0.7, rician);
  std::snprintf(buf, sizeof buf, "analytic %.6f, simulated %.6f +- %.1e", exact, mc.probability,
                mc.standard_error);
  check("Rician outage vs fading simulation",
        std::abs(mc.probability - exact) <= 4.0 * mc.standard_error, buf);
  return failures == 0 ? 0 : 1;
}

int cmd_verify(const std::string& dir) {
  const VerifyReport rep = verify_artifacts(dir);
  for (const auto& p : rep.problems) std::printf("problem: %s\n", p.c_str());
  std::printf("%s: %zu files checked in %s\n", rep.ok ? "OK" : "FAILED", rep.files_checked, dir.c_str());
  return rep.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uavplace: outage probability, bounds and UAV placement"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "uavplace " + tool_version());

  Common common;

  std::string deployment;
  auto* evaluate = app.add_subcommand("evaluate", "Outage and gradient of a given deployment");
  add_common(evaluate, common, true);
  evaluate->add_option("--deployment", deployment, "Flattened UAV coordinates, comma separated")
      ->required();

  std::size_t bounds_n = 1, samples = 2000;
  std::optional<double> achieved;
  auto* bounds = app.add_subcommand("bounds", "Lower and upper bounds around an achieved outage");
  add_common(bounds, common, true);
  bounds->add_option("--n", bounds_n, "Number of UAVs")->required();
  bounds->add_option("--achieved", achieved, "Achieved outage (default: run PSO)");
  bounds->add_option("--samples", samples, "Random deployments for the upper bound");

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "Run PSO or distributed gradient descent");
  add_common(optimize, common, true);
  optimize->add_option("algorithm", opt.algorithm, "pso or gd")
      ->required()
      ->check(CLI::IsMember({"pso", "gd"}));
  optimize->add_option("--n", opt.n, "Number of UAVs");
  optimize->add_option("--iterations", opt.iterations);
  optimize->add_option("--particles", opt.particles);
  optimize->add_option("--restarts", opt.restarts);
  optimize->add_option("--init", opt.init, "GD initial coordinates, comma separated");
  optimize->add_option("--policy", opt.policy, "GD step policy");
  optimize->add_option("--ds", opt.ds, "GD sensing radius or inf");
  optimize->add_option("--dc", opt.dc, "GD communication radius or inf");

  auto* sweep = app.add_subcommand("sweep", "Run every sweep point of an experiment document");
  add_common(sweep, common, true);

  std::string figure_id;
  bool print_config = false;
  auto* figure = app.add_subcommand("figure", "Regenerate a figure dataset and SVG plot");
  add_common(figure, common, false);
  figure->add_option("id", figure_id)->required()->check(CLI::IsMember(figure_ids()));
  figure->add_flag("--print-config", print_config, "Print the pinned default configuration");

  std::string distances = "0,0.5,1,2";
  std::size_t trials = 1000000;
  auto* mc = app.add_subcommand("mc-oracle", "Fading Monte Carlo against the analytic success");
  add_common(mc, common, true);
  mc->add_option("--distances", distances, "Ground distances, comma separated");
  mc->add_option("--trials", trials);

  auto* selftest = app.add_subcommand("selftest", "Quick numerical self checks");

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "Recompute config hashes and digests of an output directory");
  verify->add_option("dir", verify_dir)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*evaluate) return cmd_evaluate(common, deployment);
    if (*bounds) return cmd_bounds(common, bounds_n, achieved, samples);
    if (*optimize) return cmd_optimize(common, opt);
    if (*sweep) return cmd_sweep(common);
    if (*figure) return cmd_figure(common, figure_id, print_config);
    if (*mc) return cmd_mc_oracle(common, distances, trials);
    if (*selftest) return cmd_selftest();
    if (*verify) return cmd_verify(verify_dir);
  } catch (const SpecError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
