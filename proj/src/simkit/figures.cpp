// SPDX-License-Identifier: Apache-2.0
#include "uavplace/simkit/figures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "uavplace/analysis.hpp"

namespace uavplace::simkit {

namespace {

constexpr std::uint64_t kTagRandomBaseline = 21;
constexpr double kCollapseBand = 0.02;

Json steps(double lo, double hi, double step) {
  Json a = Json::array();
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step));
  for (std::size_t i = 0; i <= count; ++i) a.push_back(lo + double(i) * step);
  return a;
}

Json range(std::size_t lo, std::size_t hi) {
  Json a = Json::array();
  for (std::size_t n = lo; n <= hi; ++n) a.push_back(n);
  return a;
}

Json pso(std::size_t particles, std::size_t iterations) {
  return {{"algorithm", "pso"}, {"label", "pso"}, {"particles", particles}, {"iterations", iterations}};
}

Json gd(const std::string& label, double ds, double dc, std::size_t restarts,
        std::size_t iterations) {
  return {{"algorithm", "gd"},
          {"label", label},
          {"sensing_radius", radius_to_json(ds)},
          {"comm_radius", radius_to_json(dc)},
          {"policy", "adaptive"},
          {"iterations", iterations},
          {"restarts", restarts}};
}

Json rician_link(double altitude) {
  return {{"model", "rician"},
          {"preset", "suburban"},
          {"link", {{"ap_over_n0_db", 75.0}, {"rho", 1.0}}},
          {"los_angle_unit", "degrees"},
          {"altitude", altitude}};
}

Json gd_variants(std::size_t restarts, std::size_t iterations) {
  return Json::array({gd("gd(inf,inf)", kUnlimited, kUnlimited, restarts, iterations),
                      gd("gd(inf,10)", kUnlimited, 10.0, restarts, iterations),
                      gd("gd(10,inf)", 10.0, kUnlimited, restarts, iterations),
                      gd("gd(10,10)", 10.0, 10.0, restarts, iterations)});
}

struct Stats {
  double mean = 0.0, standard_error = 0.0, min = 0.0, max = 0.0;
  std::size_t samples = 0;
  bool complete = true;
};

Stats stats_of(const std::vector<const JobResult*>& runs) {
  Stats s;
  s.samples = runs.size();
  if (runs.empty()) return s;
  s.min = s.max = runs.front()->record.final_objective;
  double m2 = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double v = runs[i]->record.final_objective;
    if (!runs[i]->record.completed) s.complete = false;
    const double delta = v - s.mean;
    s.mean += delta / double(i + 1);
    m2 += delta * (v - s.mean);
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  if (runs.size() > 1) s.standard_error = std::sqrt(m2 / double(runs.size() - 1) / double(runs.size()));
  return s;
}

struct Context {
  FigureDataset fig;
  ExperimentSpec spec;
  Json analysis;
  std::vector<JobResult> results;

  std::vector<const JobResult*> runs(const std::string& label, std::size_t n, std::size_t hi) const {
    std::vector<const JobResult*> out;
    for (const auto& r : results)
      if (r.label == label && r.job.n == n && r.job.altitude_index == hi) out.push_back(&r);
    return out;
  }
  const RunRecord& single(const std::string& label, std::size_t n, std::size_t hi) const {
    const auto rs = runs(label, n, hi);
    if (rs.empty()) throw std::runtime_error(fig.id + ": no run labelled " + label);
    return rs.front()->record;
  }
  Objective objective(std::size_t hi) const {
    return Objective(spec.density, with_altitude(spec.channel, spec.altitudes[hi]), spec.quadrature);
  }
  double number(const std::string& key) const { return analysis.at(key).get<double>(); }
};

bool closed_form_channel(const ChannelModel& ch) {
  const auto* ray = std::get_if<RayleighParams>(&ch);
  return ray && ray->lambda == 1.0 && ray->path_loss_exponent == 2.0;
}

std::vector<double> sorted_positions(const RunRecord& rec) {
  auto xs = rec.final_deployment.flatten();
  std::sort(xs.begin(), xs.end());
  return xs;
}

void fig2(Context& c) {
  auto& t = c.fig.table;
  t.columns = {"h", "n", "pso", "closed_form", "closed_form_fallback", "collapsed_quadrature",
               "upper_bound_random_exact", "lower_bound_altitude"};
  const auto* box = std::get_if<density_kind::UniformBox2D>(&c.spec.density.kind());
  const bool square = box && box->bx - box->ax == box->by - box->ay;
  const bool closed = square && closed_form_channel(c.spec.channel);
  const auto* ray = std::get_if<RayleighParams>(&c.spec.channel);
  for (std::size_t hi = 0; hi < c.spec.altitudes.size(); ++hi) {
    const double h = c.spec.altitudes[hi];
    const Objective obj = c.objective(hi);
    const Point mid = c.spec.density.support_bounds().center();
    Series sim{"PSO h=" + format_number(h), {}, {}, true};
    Series formula{"closed form h=" + format_number(h), {}, {}, false};
    for (std::size_t n : c.spec.n_values) {
      const double p = c.single("pso", n, hi).final_objective;
      analysis::ClosedForm cf{NAN, false};
      if (closed) cf = analysis::closed_form_uniform_square(n, h, 0.5 * (box->bx - box->ax));
      const double lower =
          ray ? analysis::lower_bound_altitude(ray->lambda, h, ray->path_loss_exponent, n) : NAN;
      t.add({format_number(h), std::to_string(n), format_number(p), format_number(cf.value),
             cf.fallback ? "1" : "0", format_number(obj.outage(Deployment::collapsed(mid, n))),
             format_number(analysis::upper_bound_random_exact(obj, n, c.spec.density)),
             format_number(lower)});
      sim.x.push_back(double(n));
      sim.y.push_back(p);
      formula.x.push_back(double(n));
      formula.y.push_back(cf.value);
    }
    c.fig.plot.series.push_back(sim);
    if (closed) c.fig.plot.series.push_back(formula);
  }
  c.fig.plot.x_label = "number of UAVs n";
  c.fig.plot.y_label = "outage probability";
  c.fig.plot.log_y = true;
}

void fig3(Context& c) {
  auto& t = c.fig.table;
  t.columns = {"h2", "n", "pso", "closed_form", "closed_form_fallback", "upper_bound_random_exact",
               "lower_bound_altitude"};
  const auto* g = std::get_if<density_kind::Gaussian>(&c.spec.density.kind());
  const bool closed = g && c.spec.density.dim() == 1 && closed_form_channel(c.spec.channel);
  const auto* ray = std::get_if<RayleighParams>(&c.spec.channel);
  const Density law = c.spec.density;
  for (std::size_t hi = 0; hi < c.spec.altitudes.size(); ++hi) {
    const double h = c.spec.altitudes[hi];
    const Objective obj = c.objective(hi);
    Series sim{"PSO h2=" + format_number(h * h), {}, {}, true};
    Series formula{"closed form h2=" + format_number(h * h), {}, {}, false};
    Series upper{"upper bound h2=" + format_number(h * h), {}, {}, false};
    for (std::size_t n : c.spec.n_values) {
      const double p = c.single("pso", n, hi).final_objective;
      analysis::ClosedForm cf{NAN, false};
      if (closed) cf = analysis::closed_form_gaussian(n, h, std::sqrt(g->variance[0]));
      const double up = analysis::upper_bound_random_exact(obj, n, law);
      const double lower =
          ray ? analysis::lower_bound_altitude(ray->lambda, h, ray->path_loss_exponent, n) : NAN;
      t.add({format_number(h * h), std::to_string(n), format_number(p), format_number(cf.value),
             cf.fallback ? "1" : "0", format_number(up), format_number(lower)});
      for (Series* s : {&sim, &formula, &upper}) s->x.push_back(double(n));
      sim.y.push_back(p);
      formula.y.push_back(cf.value);
      upper.y.push_back(up);
    }
    c.fig.plot.series.push_back(sim);
    if (closed) c.fig.plot.series.push_back(formula);
    c.fig.plot.series.push_back(upper);
  }
  c.fig.plot.x_label = "number of UAVs n";
  c.fig.plot.y_label = "outage probability";
  c.fig.plot.log_y = true;
}

// Optimal positions against altitude, shared by both collapse figures.
void collapse(Context& c) {
  if (c.spec.n_values.size() != 1) throw std::invalid_argument(c.fig.id + ": needs a single n");
  const std::size_t n = c.spec.n_values.front();
  auto& t = c.fig.table;
  t.columns = {"h"};
  for (std::size_t i = 1; i <= n; ++i) t.columns.push_back("u" + std::to_string(i));
  t.columns.push_back("outage");
  t.columns.push_back("collapsed");
  std::vector<Series> tracks(n);
  for (std::size_t i = 0; i < n; ++i) tracks[i] = {"u" + std::to_string(i + 1), {}, {}, false};
  const Point mid = c.spec.density.support_bounds().center();
  std::vector<double> spread;
  std::vector<bool> collapsed;
  for (std::size_t hi = 0; hi < c.spec.altitudes.size(); ++hi) {
    const RunRecord& rec = c.single("pso", n, hi);
    const auto xs = sorted_positions(rec);
    bool together = true;
    std::vector<std::string> row{format_number(c.spec.altitudes[hi])};
    for (std::size_t i = 0; i < n; ++i) {
      row.push_back(format_number(xs[i]));
      tracks[i].x.push_back(c.spec.altitudes[hi]);
      tracks[i].y.push_back(xs[i]);
      together = together && std::abs(xs[i] - mid[0]) <= kCollapseBand * c.spec.density.support_bounds().extent(0);
    }
    row.push_back(format_number(rec.final_objective));
    row.push_back(together ? "1" : "0");
    t.add(row);
    spread.push_back(xs.back() - xs.front());
    collapsed.push_back(together);
  }
  // Smallest altitude from which every later altitude is collapsed.
  Json threshold = nullptr;
  for (std::size_t k = collapsed.size(); k-- > 0 && collapsed[k];) threshold = c.spec.altitudes[k];
  std::size_t rises = 0;
  double largest_rise = 0.0;
  for (std::size_t k = 1; k < spread.size(); ++k)
    if (spread[k] > spread[k - 1]) {
      ++rises;
      largest_rise = std::max(largest_rise, spread[k] - spread[k - 1]);
    }
  c.fig.summary = {{"collapse_threshold", threshold},
                   {"collapse_band", kCollapseBand},
                   {"spread", spread},
                   {"spread_increases", rises},
                   {"largest_spread_increase", largest_rise}};
  c.fig.plot.series = tracks;
  c.fig.plot.x_label = "altitude h";
  c.fig.plot.y_label = "optimal UAV location";
}

// Algorithm comparison over n at the first altitude: PSO, every GD variant
// (restart mean), all UAVs at the density centre and random placement.
void comparison(Context& c) {
  auto& t = c.fig.table;
  t.columns = {"h", "n", "algorithm", "mean", "standard_error", "min", "max", "samples", "complete"};
  const std::size_t random_samples = c.analysis.at("random_samples").get<std::size_t>();
  std::map<std::string, Series> series;
  std::vector<std::string> order;
  auto put = [&](double h, std::size_t n, const std::string& name, const Stats& s) {
    t.add({format_number(h), std::to_string(n), name, format_number(s.mean),
           format_number(s.standard_error), format_number(s.min), format_number(s.max),
           std::to_string(s.samples), s.complete ? "1" : "0"});
    if (!series.count(name)) {
      order.push_back(name);
      series[name] = {name, {}, {}, false};
    }
    series[name].x.push_back(double(n));
    series[name].y.push_back(s.mean);
    if (!s.complete) c.fig.complete = false;
  };
  for (std::size_t hi = 0; hi < c.spec.altitudes.size(); ++hi) {
    const double h = c.spec.altitudes[hi];
    const Objective obj = c.objective(hi);
    const Point centre = c.spec.density.center().value_or(c.spec.density.support_bounds().center());
    const Density law = init_law(c.spec.density);
    for (std::size_t n : c.spec.n_values) {
      for (const auto& opt : c.spec.optimizers) put(h, n, opt.label, stats_of(c.runs(opt.label, n, hi)));
      const double at_centre = obj.outage(Deployment::collapsed(centre, n));
      put(h, n, "center", {at_centre, 0.0, at_centre, at_centre, 1, true});
      if (random_samples > 0) {
        const auto mc = analysis::upper_bound_random(
            obj, n, law, random_samples, RandomStream(c.spec.seed, {kTagRandomBaseline, n, hi}));
        put(h, n, "random", {mc.value, mc.standard_error, NAN, NAN, mc.samples, true});
      }
    }
  }
  for (const auto& name : order) c.fig.plot.series.push_back(series[name]);
  c.fig.plot.x_label = "number of UAVs n";
  c.fig.plot.y_label = "outage probability";
  c.fig.plot.log_y = true;
}

// GD against PSO over altitude; relative gap (GD mean - PSO) / PSO.
void fig8(Context& c) {
  auto& t = c.fig.table;
  t.columns = {"h", "n", "pso", "gd_mean", "gd_standard_error", "gd_min", "gd_max", "relative_gap"};
  std::string gd_label;
  for (const auto& o : c.spec.optimizers)
    if (o.algorithm == "gd") gd_label = o.label;
  std::map<std::size_t, Series> pso_series, gd_series;
  for (std::size_t hi = 0; hi < c.spec.altitudes.size(); ++hi) {
    const double h = c.spec.altitudes[hi];
    for (std::size_t n : c.spec.n_values) {
      const double p = c.single("pso", n, hi).final_objective;
      const Stats s = stats_of(c.runs(gd_label, n, hi));
      if (!s.complete) c.fig.complete = false;
      t.add({format_number(h), std::to_string(n), format_number(p), format_number(s.mean),
             format_number(s.standard_error), format_number(s.min), format_number(s.max),
             format_number((s.mean - p) / p)});
      auto& ps = pso_series[n];
      auto& gs = gd_series[n];
      ps.label = "PSO n=" + std::to_string(n);
      gs.label = gd_label + " n=" + std::to_string(n);
      ps.x.push_back(h);
      ps.y.push_back(p);
      gs.x.push_back(h);
      gs.y.push_back(s.mean);
    }
  }
  for (std::size_t n : c.spec.n_values) {
    c.fig.plot.series.push_back(pso_series[n]);
    c.fig.plot.series.push_back(gd_series[n]);
  }
  c.fig.plot.x_label = "altitude h";
  c.fig.plot.y_label = "outage probability";
  c.fig.plot.log_y = true;
}

const std::map<std::string, std::set<std::string>>& analysis_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"fig2", {}}, {"fig3", {}}, {"fig4a", {}}, {"fig4b", {}},
      {"fig6", {"random_samples"}}, {"fig7", {"random_samples"}}, {"fig8", {}}};
  return keys;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2", "fig3", "fig4a", "fig4b", "fig6", "fig7", "fig8"};
  return ids;
}

Json default_figure_config(const std::string& id) {
  Json j;
  j["name"] = id;
  j["seed"] = 1;
  j["output_dir"] = "out/" + id;
  j["analysis"] = Json::object();
  if (id == "fig2") {
    j["length_unit"] = "unit";
    j["density"] = {{"kind", "uniform_box2d"}, {"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}};
    j["channel"] = {{"model", "rayleigh"}, {"lambda", 1.0}, {"path_loss_exponent", 2.0}};
    j["n_values"] = range(1, 8);
    j["altitudes"] = {0.0, 0.25, 0.5, 1.0};
    j["optimizers"] = Json::array({pso(40, 200)});
    j["quadrature"] = {{"method", "gauss_legendre_2d"}, {"nodes_per_axis", 64}};
  } else if (id == "fig3") {
    j["length_unit"] = "unit";
    j["density"] = {{"kind", "gaussian1d"}, {"mean", 0.0}, {"variance", 1.0}};
    j["channel"] = {{"model", "rayleigh"}, {"lambda", 1.0}, {"path_loss_exponent", 2.0}};
    j["n_values"] = range(1, 10);
    j["altitudes"] = {std::sqrt(0.5), 1.0, std::sqrt(2.0)};
    j["optimizers"] = Json::array({pso(40, 200)});
  } else if (id == "fig4a") {
    j["length_unit"] = "unit";
    j["density"] = {{"kind", "uniform1d"}, {"a", 0.0}, {"b", 1.0}};
    j["channel"] = {{"model", "rayleigh"}, {"lambda", 1.0}, {"path_loss_exponent", 2.0}};
    j["n"] = 4;
    j["altitudes"] = steps(0.0, 1.0, 0.05);
    j["optimizers"] = Json::array({pso(40, 200)});
  } else if (id == "fig4b") {
    j["length_unit"] = "unit";
    j["density"] = {{"kind", "uniform1d"}, {"a", 0.0}, {"b", 1.0}};
    j["channel"] = {{"model", "rician"}, {"preset", "suburban"}, {"lambda", 1.0},
                    {"los_angle_unit", "degrees"}};
    j["n"] = 4;
    j["altitudes"] = steps(0.0, 1.5, 0.05);
    j["optimizers"] = Json::array({pso(30, 100)});
    j["quadrature"] = {{"rician_table", 16385}};
  } else if (id == "fig6") {
    j["length_unit"] = "m";
    j["density"] = {{"kind", "uniform1d"}, {"a", 0.0}, {"b", 1000.0}};
    j["channel"] = rician_link(500.0);
    j["n_values"] = range(2, 6);
    j["optimizers"] = gd_variants(50, 300);
    j["optimizers"].insert(j["optimizers"].begin(), pso(40, 200));
    j["quadrature"] = {{"rician_table", 16385}};
    j["analysis"] = {{"random_samples", 2000}};
  } else if (id == "fig7") {
    j["length_unit"] = "m";
    j["density"] = {{"kind", "gaussian2d"}, {"mean", {0.0, 0.0}}, {"variance", {100.0, 100.0}}};
    j["channel"] = rician_link(300.0);
    j["n_values"] = range(2, 4);
    j["optimizers"] = gd_variants(20, 150);
    j["optimizers"].insert(j["optimizers"].begin(), pso(30, 100));
    j["quadrature"] = {{"method", "gauss_legendre_2d"}, {"nodes_per_axis", 48}, {"rician_table", 16385}};
    j["analysis"] = {{"random_samples", 500}};
  } else if (id == "fig8") {
    j["length_unit"] = "m";
    j["density"] = {{"kind", "uniform1d"}, {"a", 0.0}, {"b", 1000.0}};
    j["channel"] = {{"model", "rayleigh"},
                    {"link", {{"ap_over_n0_db", 75.0}, {"rho", 1.0}}},
                    {"path_loss_exponent", 2.0}};
    j["n_values"] = range(2, 4);
    j["altitudes"] = {100.0, 300.0, 500.0, 1000.0};
    j["optimizers"] = Json::array({pso(40, 200), gd("gd(500,500)", 500.0, 500.0, 20, 300)});
  } else {
    throw std::invalid_argument("unknown figure id '" + id + "'");
  }
  return j;
}

FigureDataset compute_figure(const std::string& id, const FigureOptions& options) {
  return compute_figure(id, default_figure_config(id), options);
}

FigureDataset compute_figure(const std::string& id, Json config, const FigureOptions& options) {
  const auto keys = analysis_keys().find(id);
  if (keys == analysis_keys().end()) throw std::invalid_argument("unknown figure id '" + id + "'");
  if (options.seed) config["seed"] = *options.seed;
  if (options.quadrature) config["quadrature"] = *options.quadrature;

  Context c;
  c.fig.id = id;
  c.fig.config = config;
  Json doc = config;
  Problems problems;
  if (doc.is_object() && doc.contains("analysis")) {
    c.analysis = doc["analysis"];
    doc.erase("analysis");
    if (!c.analysis.is_object()) {
      problems.add("/analysis", "expected an object");
    } else {
      for (const auto& [k, v] : c.analysis.items())
        if (!keys->second.count(k)) problems.add("/analysis/" + k, "unknown key");
      for (const auto& k : keys->second)
        if (!c.analysis.contains(k) || !is_count(c.analysis[k]))
          problems.add("/analysis/" + k, "expected a non-negative integer");
    }
  } else if (!keys->second.empty()) {
    problems.add("/analysis", "required member missing");
  }
  try {
    c.spec = parse_experiment(doc);
  } catch (const SpecError& e) {
    for (const auto& p : e.problems()) problems.list.push_back(p);
  }
  problems.raise_if_any();
  c.fig.seed = c.spec.seed;

  RunOptions run_options;
  run_options.jobs = options.jobs;
  run_options.progress = options.progress;
  c.results = execute(c.spec, run_options);
  for (const auto& r : c.results)
    if (!r.record.completed) c.fig.complete = false;

  c.fig.plot.title = id + " (" + c.spec.length_unit + ")";
  if (id == "fig2") fig2(c);
  else if (id == "fig3") fig3(c);
  else if (id == "fig4a" || id == "fig4b") collapse(c);
  else if (id == "fig6" || id == "fig7") comparison(c);
  else fig8(c);
  return c.fig;
}

void write_figure(const FigureDataset& fig, const std::filesystem::path& dir) {
  ArtifactStore store(dir, Stamp{"figure " + fig.id, fig.config, fig.seed, fig.complete});
  store.write_csv(fig.id + ".csv", fig.table);
  store.write_svg(fig.id + ".svg", render_svg(fig.plot));
  if (!fig.summary.is_null()) store.write_json(fig.id + "_summary.json", fig.summary);
  store.write_manifest();
}

}  // namespace uavplace::simkit
