// SPDX-License-Identifier: Apache-2.0
#include "uavplace/simkit/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace uavplace::simkit {

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out = "invalid specification:";
  for (const auto& l : lines) out += "\n  - " + l;
  return out;
}

// Typed access to the members of one JSON object. Every key read is marked
// as known; finish() reports the rest.
class Fields {
 public:
  Fields(const Json& j, std::string where, Problems& problems)
      : j_(j), where_(std::move(where)), problems_(problems) {
    if (!j_.is_object()) {
      problems_.add(where_, "expected an object");
      ok_ = false;
    }
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return ok_ && j_.contains(key);
  }
  std::string at(const std::string& key) const { return where_ + "/" + key; }

  double number(const std::string& key, double fallback, bool required = false) {
    if (!has(key)) {
      if (required && ok_) problems_.add(at(key), "required number missing");
      return fallback;
    }
    const Json& v = j_.at(key);
    if (!v.is_number()) {
      problems_.add(at(key), "expected a number");
      return fallback;
    }
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback, bool required = false) {
    if (!has(key)) {
      if (required && ok_) problems_.add(at(key), "required count missing");
      return fallback;
    }
    const Json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      problems_.add(at(key), "expected a non-negative integer");
      return fallback;
    }
    return v.get<std::size_t>();
  }

  std::string text(const std::string& key, const std::string& fallback, bool required = false) {
    if (!has(key)) {
      if (required && ok_) problems_.add(at(key), "required string missing");
      return fallback;
    }
    const Json& v = j_.at(key);
    if (!v.is_string()) {
      problems_.add(at(key), "expected a string");
      return fallback;
    }
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) {
      problems_.add(at(key), "expected true or false");
      return fallback;
    }
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key, bool required = false) {
    std::vector<double> out;
    if (!has(key)) {
      if (required && ok_) problems_.add(at(key), "required array missing");
      return out;
    }
    const Json& v = j_.at(key);
    if (!v.is_array()) {
      problems_.add(at(key), "expected an array of numbers");
      return out;
    }
    for (const auto& e : v) {
      if (!e.is_number()) {
        problems_.add(at(key), "expected an array of numbers");
        return {};
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  const Json* child(const std::string& key, bool required = false) {
    if (!has(key)) {
      if (required && ok_) problems_.add(at(key), "required member missing");
      return nullptr;
    }
    return &j_.at(key);
  }

  void finish() {
    if (!ok_) return;
    for (const auto& [key, value] : j_.items())
      if (!known_.count(key)) problems_.add(at(key), "unknown key");
  }

 private:
  const Json& j_;
  std::string where_;
  Problems& problems_;
  std::set<std::string> known_;
  bool ok_ = true;
};

// Runs a validating factory and turns its exception into a problem entry.
template <typename F>
auto guarded(const std::string& where, Problems& problems, F&& make, decltype(make()) fallback) {
  try {
    return make();
  } catch (const std::exception& e) {
    problems.add(where, e.what());
    return fallback;
  }
}

Point parse_point(const std::vector<double>& xs, const std::string& where, Problems& problems) {
  if (xs.size() == 1) return Point(xs[0]);
  if (xs.size() == 2) return Point(xs[0], xs[1]);
  problems.add(where, "expected 1 or 2 coordinates");
  return Point(0.0);
}

}  // namespace

SpecError::SpecError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

void Problems::raise_if_any() const {
  if (!list.empty()) throw SpecError(list);
}

std::string canonical_json(const Json& j) {
  // nlohmann objects are std::map backed, so dump() already sorts keys.
  return j.dump(-1, ' ', false, Json::error_handler_t::strict);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const Json& config) { return fnv1a_hex(canonical_json(config)); }

double parse_radius(const Json& j, const std::string& where, Problems& problems) {
  if (j.is_string() && j.get<std::string>() == "inf") return kUnlimited;
  if (j.is_number() && j.get<double>() > 0.0) return j.get<double>();
  problems.add(where, "expected a positive number or \"inf\"");
  return kUnlimited;
}

Json radius_to_json(double r) { return std::isinf(r) ? Json("inf") : Json(r); }

Density parse_density(const Json& j, const std::string& where, Problems& problems) {
  Fields f(j, where, problems);
  const std::string kind = f.text("kind", "", true);
  Density fallback = Density::uniform1d(0.0, 1.0);
  Density out = fallback;
  if (kind == "uniform1d") {
    const double a = f.number("a", 0.0, true), b = f.number("b", 1.0, true);
    out = guarded(where, problems, [&] { return Density::uniform1d(a, b); }, fallback);
  } else if (kind == "uniform_box2d") {
    const auto x = f.numbers("x", true), y = f.numbers("y", true);
    if (x.size() == 2 && y.size() == 2)
      out = guarded(where, problems,
                    [&] { return Density::uniform_box2d(x[0], x[1], y[0], y[1]); }, fallback);
    else if (!x.empty() || !y.empty())
      problems.add(where, "x and y must each be [lo, hi]");
  } else if (kind == "gaussian1d") {
    const double m = f.number("mean", 0.0), v = f.number("variance", 1.0);
    out = guarded(where, problems, [&] { return Density::gaussian1d(m, v); }, fallback);
  } else if (kind == "gaussian2d") {
    const auto m = f.numbers("mean", true), v = f.numbers("variance", true);
    if (m.size() == 2 && v.size() == 2)
      out = guarded(where, problems,
                    [&] { return Density::gaussian2d(Point(m[0], m[1]), v[0], v[1]); }, fallback);
    else
      problems.add(where, "mean and variance must each have 2 entries");
  } else if (kind == "mixture") {
    const auto w = f.numbers("weights", true);
    std::vector<Density> comps;
    if (const Json* c = f.child("components", true)) {
      if (!c->is_array()) {
        problems.add(f.at("components"), "expected an array");
      } else {
        for (std::size_t i = 0; i < c->size(); ++i)
          comps.push_back(parse_density((*c)[i], f.at("components") + "/" + std::to_string(i), problems));
      }
    }
    out = guarded(where, problems, [&] { return Density::mixture(w, comps); }, fallback);
  } else if (kind == "grid") {
    if (f.has("path")) {
      const std::string path = f.text("path", "");
      out = guarded(where, problems, [&] { return load_grid_csv(path); }, fallback);
    } else {
      const auto bbox = f.numbers("bbox", true);
      const std::size_t nx = f.count("nx", 0, true), ny = f.count("ny", 1);
      const auto values = f.numbers("values", true);
      if (bbox.size() == 2 || bbox.size() == 4) {
        const Box box = bbox.size() == 2 ? Box::interval(bbox[0], bbox[1])
                                         : Box::rect(bbox[0], bbox[1], bbox[2], bbox[3]);
        out = guarded(where, problems, [&] { return Density::grid(box, nx, ny, values); }, fallback);
      } else {
        problems.add(f.at("bbox"), "expected [x0, x1] or [x0, x1, y0, y1]");
      }
    }
  } else if (kind == "point_mass") {
    const Point at = parse_point(f.numbers("at", true), f.at("at"), problems);
    out = Density::point_mass(at);
  } else if (!kind.empty()) {
    problems.add(f.at("kind"), "unknown density kind '" + kind + "'");
  }
  f.finish();
  return out;
}

ChannelModel parse_channel(const Json& j, const std::string& where, Problems& problems) {
  Fields f(j, where, problems);
  const std::string model = f.text("model", "", true);
  double lambda = 1.0;
  if (const Json* link = f.child("link")) {
    Fields l(*link, f.at("link"), problems);
    const double db = l.number("ap_over_n0_db", 0.0, true);
    const double rho = l.number("rho", 1.0, true);
    l.finish();
    lambda = guarded(f.at("link"), problems, [&] { return lambda_from_link(db, rho); }, 1.0);
    if (f.has("lambda")) problems.add(f.at("lambda"), "give either lambda or link, not both");
  } else {
    lambda = f.number("lambda", 1.0);
  }
  const double h = f.number("altitude", 0.0);
  ChannelModel out = RayleighParams{};
  if (model == "rayleigh") {
    RayleighParams p;
    p.lambda = lambda;
    p.altitude = h;
    p.path_loss_exponent = f.number("path_loss_exponent", 2.0);
    out = p;
  } else if (model == "rician") {
    const std::string preset = f.text("preset", "suburban");
    if (preset != "suburban") problems.add(f.at("preset"), "only the suburban preset exists");
    RicianParams p = RicianParams::suburban(lambda, h);
    p.a1 = f.number("a1", p.a1);
    p.b1 = f.number("b1", p.b1);
    p.a2 = f.number("a2", p.a2);
    p.b2 = f.number("b2", p.b2);
    p.a3 = f.number("a3", p.a3);
    p.b3 = f.number("b3", p.b3);
    const std::string unit = f.text("los_angle_unit", "radians");
    if (unit == "degrees")
      p.los_angle_unit = AngleUnit::degrees;
    else if (unit != "radians")
      problems.add(f.at("los_angle_unit"), "expected \"radians\" or \"degrees\"");
    out = p;
  } else if (!model.empty()) {
    problems.add(f.at("model"), "unknown channel model '" + model + "'");
  }
  f.finish();
  try {
    validate(out);
  } catch (const std::exception& e) {
    problems.add(where, e.what());
  }
  return out;
}

QuadratureSpec parse_quadrature(const Json& j, int dim, const std::string& where,
                                Problems& problems) {
  QuadratureSpec q = QuadratureSpec::defaults_for(dim);
  if (j.is_null()) return q;
  Fields f(j, where, problems);
  if (f.has("method")) {
    const std::string m = f.text("method", "");
    q.method = guarded(f.at("method"), problems, [&] { return parse_method(m); }, q.method);
  }
  q.target_rel_tol = f.number("target_rel_tol", q.target_rel_tol);
  q.max_evals = f.count("max_evals", q.max_evals);
  q.base_panels = f.count("base_panels", q.base_panels);
  q.nodes_per_axis = f.count("nodes_per_axis", q.nodes_per_axis);
  q.qmc_points = f.count("qmc_points", q.qmc_points);
  q.qmc_shifts = f.count("qmc_shifts", q.qmc_shifts);
  q.disk_radial = f.count("disk_radial", q.disk_radial);
  q.disk_angular = f.count("disk_angular", q.disk_angular);
  q.rician_table = f.count("rician_table", q.rician_table);
  f.finish();
  try {
    q.validate(dim);
  } catch (const std::exception& e) {
    problems.add(where, e.what());
  }
  return q;
}

PsoConfig parse_pso(const Json& j, const std::string& where, Problems& problems) {
  PsoConfig c;
  if (j.is_null()) return c;
  Fields f(j, where, problems);
  c.particles = f.count("particles", c.particles);
  c.iterations = f.count("iterations", c.iterations);
  c.inertia_start = f.number("inertia_start", c.inertia_start);
  c.inertia_end = f.number("inertia_end", c.inertia_end);
  c.c1 = f.number("c1", c.c1);
  c.c2 = f.number("c2", c.c2);
  c.velocity_clamp = f.number("velocity_clamp", c.velocity_clamp);
  f.finish();
  try {
    c.validate();
  } catch (const std::exception& e) {
    problems.add(where, e.what());
  }
  return c;
}

GdConfig parse_gd(const Json& j, const std::string& where, Problems& problems) {
  GdConfig c;
  if (j.is_null()) return c;
  Fields f(j, where, problems);
  c.iterations = f.count("iterations", c.iterations);
  c.eta0 = f.number("eta0", c.eta0);
  c.eta_growth_limit = f.number("eta_growth_limit", c.eta_growth_limit);
  if (f.has("policy")) {
    const std::string p = f.text("policy", "");
    c.policy = guarded(f.at("policy"), problems, [&] { return parse_policy(p); }, c.policy);
  }
  if (const Json* r = f.child("sensing_radius")) c.sensing_radius = parse_radius(*r, f.at("sensing_radius"), problems);
  if (const Json* r = f.child("comm_radius")) c.comm_radius = parse_radius(*r, f.at("comm_radius"), problems);
  c.sequential = f.flag("sequential", c.sequential);
  c.grad_tol = f.number("grad_tol", c.grad_tol);
  f.finish();
  try {
    c.validate();
  } catch (const std::exception& e) {
    problems.add(where, e.what());
  }
  return c;
}

ExperimentSpec parse_experiment(const Json& j) {
  Problems problems;
  ExperimentSpec spec;
  Fields f(j, "", problems);
  spec.name = f.text("name", "", true);
  spec.length_unit = f.text("length_unit", "", true);
  spec.output_dir = f.text("output_dir", spec.output_dir);
  if (f.has("seed")) {
    const Json& s = j.at("seed");
    if (is_count(s))
      spec.seed = s.get<std::uint64_t>();
    else
      problems.add("/seed", "expected a non-negative integer");
  }
  if (const Json* d = f.child("density", true)) spec.density = parse_density(*d, "/density", problems);
  if (const Json* c = f.child("channel", true)) spec.channel = parse_channel(*c, "/channel", problems);
  const int dim = spec.density.dim();

  if (f.has("n") && f.has("n_values")) problems.add("/n", "give either n or n_values, not both");
  if (f.has("n_values")) {
    for (double v : f.numbers("n_values")) {
      if (v < 1.0 || v != std::floor(v)) problems.add("/n_values", "entries must be integers >= 1");
      else spec.n_values.push_back(static_cast<std::size_t>(v));
    }
    if (spec.n_values.empty()) problems.add("/n_values", "must not be empty");
  } else {
    const std::size_t n = f.count("n", 0, true);
    if (n >= 1)
      spec.n_values.push_back(n);
    else if (j.is_object() && j.contains("n"))
      problems.add("/n", "must be >= 1");
  }

  if (f.has("altitude") && f.has("altitudes"))
    problems.add("/altitude", "give either altitude or altitudes, not both");
  if (f.has("altitudes")) {
    spec.altitudes = f.numbers("altitudes");
    if (spec.altitudes.empty()) problems.add("/altitudes", "must not be empty");
  } else {
    spec.altitudes.push_back(f.number("altitude", altitude_of(spec.channel)));
  }
  for (double h : spec.altitudes)
    if (!(h >= 0.0) || !std::isfinite(h)) problems.add("/altitudes", "altitudes must be finite and >= 0");

  spec.quadrature = parse_quadrature(f.has("quadrature") ? j.at("quadrature") : Json(), dim,
                                     "/quadrature", problems);

  if (const Json* opts = f.child("optimizers", true)) {
    if (!opts->is_array() || opts->empty()) {
      problems.add("/optimizers", "expected a non-empty array");
    } else {
      for (std::size_t i = 0; i < opts->size(); ++i) {
        const std::string where = "/optimizers/" + std::to_string(i);
        const Json& o = (*opts)[i];
        if (!o.is_object()) {
          problems.add(where, "expected an object");
          continue;
        }
        OptimizerSpec os;
        os.algorithm = o.value("algorithm", std::string());
        os.label = o.value("label", os.algorithm);
        Json body = o;
        body.erase("algorithm");
        body.erase("label");
        if (os.algorithm == "pso") {
          os.pso = parse_pso(body, where, problems);
        } else if (os.algorithm == "gd") {
          if (body.contains("restarts")) {
            if (is_count(body["restarts"]) && body["restarts"].get<std::size_t>() >= 1)
              os.restarts = body["restarts"].get<std::size_t>();
            else
              problems.add(where + "/restarts", "expected an integer >= 1");
            body.erase("restarts");
          }
          if (body.contains("init")) {
            if (body["init"].is_array()) {
              for (const auto& v : body["init"])
                if (v.is_number()) os.init.push_back(v.get<double>());
              if (os.init.size() != body["init"].size())
                problems.add(where + "/init", "expected flattened coordinates");
            } else {
              problems.add(where + "/init", "expected flattened coordinates");
            }
            body.erase("init");
          }
          os.gd = parse_gd(body, where, problems);
          if (!os.init.empty()) {
            if (os.init.size() % std::size_t(dim) != 0)
              problems.add(where + "/init", "length must be a multiple of the dimension");
            for (std::size_t n : spec.n_values)
              if (os.init.size() != n * std::size_t(dim))
                problems.add(where + "/init", "length does not match n = " + std::to_string(n));
          }
        } else {
          problems.add(where + "/algorithm", "expected \"pso\" or \"gd\"");
        }
        spec.optimizers.push_back(os);
      }
    }
  }
  f.finish();
  problems.raise_if_any();
  spec.source = j;
  return spec;
}

ModelSpec parse_model(const Json& j) {
  Problems problems;
  ModelSpec m;
  Fields f(j, "", problems);
  for (const char* skip : {"name", "n", "n_values", "altitudes", "optimizers", "output_dir"})
    f.has(skip);
  m.length_unit = f.text("length_unit", "");
  if (f.has("seed")) {
    if (is_count(j.at("seed")))
      m.seed = j.at("seed").get<std::uint64_t>();
    else
      problems.add("/seed", "expected a non-negative integer");
  }
  if (const Json* d = f.child("density", true)) m.density = parse_density(*d, "/density", problems);
  if (const Json* c = f.child("channel", true)) m.channel = parse_channel(*c, "/channel", problems);
  if (f.has("altitude")) {
    const double h = f.number("altitude", 0.0);
    if (!(h >= 0.0) || !std::isfinite(h))
      problems.add("/altitude", "must be finite and >= 0");
    else
      m.channel = with_altitude(m.channel, h);
  }
  m.quadrature = parse_quadrature(f.has("quadrature") ? j.at("quadrature") : Json(),
                                  m.density.dim(), "/quadrature", problems);
  f.finish();
  problems.raise_if_any();
  return m;
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw SpecError({path + ": " + e.what()});
  }
  return parse_experiment(j);
}

}  // namespace uavplace::simkit
