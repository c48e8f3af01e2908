// SPDX-License-Identifier: Apache-2.0
#include "uavplace/objective.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "uavplace/kernels.hpp"
#include "uavplace/quadrature.hpp"

namespace uavplace {

namespace dk = density_kind;

namespace {

// Quadrature nodes with weights that already include f(x).
struct NodeSet {
  std::vector<double> xs, ys, w;
  std::vector<std::size_t> groups;  // qmc: start offsets of each shift, plus the end

  std::size_t size() const { return xs.size(); }
  void add(double x, double y, double weight, int dim) {
    xs.push_back(x);
    if (dim == 2) ys.push_back(y);
    w.push_back(weight);
  }
  kernels::NodeView view() const { return {xs, ys}; }
};

void append_tensor_gl(NodeSet& out, const Box& box, std::size_t nx, std::size_t ny, double scale,
                      const Density& f) {
  const auto& gx = quadrature::gauss_legendre(nx);
  const auto& gy = quadrature::gauss_legendre(ny);
  const double hx = 0.5 * box.extent(0), cx = 0.5 * (box.lo[0] + box.hi[0]);
  const double hy = 0.5 * box.extent(1), cy = 0.5 * (box.lo[1] + box.hi[1]);
  for (std::size_t j = 0; j < ny; ++j) {
    const double y = cy + hy * gy.nodes[j];
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = cx + hx * gx.nodes[i];
      const double w = scale * hx * hy * gx.weights[i] * gy.weights[j] * f.eval(Point(x, y));
      if (w != 0.0) out.add(x, y, w, 2);
    }
  }
}

// Tensor Gauss-Legendre set for a 2-D density; order is the per-axis count
// over a smooth piece.
void append_density_nodes_2d(NodeSet& out, const Density& f, std::size_t order, double scale) {
  const auto& kind = f.kind();
  if (const auto* m = std::get_if<dk::Mixture>(&kind)) {
    for (std::size_t k = 0; k < m->weights.size(); ++k)
      if (m->weights[k] > 0.0)
        append_density_nodes_2d(out, m->components[k], order, scale * m->weights[k]);
    return;
  }
  if (const auto* p = std::get_if<dk::PointMass>(&kind)) {
    out.add(p->at[0], p->at[1], scale, 2);
    return;
  }
  if (const auto* g = std::get_if<dk::Grid>(&kind)) {
    const std::size_t ox = std::max<std::size_t>(2, (order + g->nx - 1) / g->nx);
    const std::size_t oy = std::max<std::size_t>(2, (order + g->ny - 1) / g->ny);
    const double dx = g->bbox.extent(0) / double(g->nx);
    const double dy = g->bbox.extent(1) / double(g->ny);
    for (std::size_t iy = 0; iy < g->ny; ++iy)
      for (std::size_t ix = 0; ix < g->nx; ++ix) {
        if (g->value(ix, iy) == 0.0) continue;
        const double x0 = g->bbox.lo[0] + double(ix) * dx;
        const double y0 = g->bbox.lo[1] + double(iy) * dy;
        append_tensor_gl(out, Box::rect(x0, x0 + dx, y0, y0 + dy), ox, oy, scale, f);
      }
    return;
  }
  append_tensor_gl(out, f.support_bounds(), order, order, scale, f);
}

NodeSet qmc_nodes(const Density& f, const QuadratureSpec& q) {
  NodeSet out;
  const Box box = f.support_bounds();
  const std::size_t per_shift = q.qmc_points / q.qmc_shifts;
  const double w0 = box.measure() / double(per_shift * q.qmc_shifts);
  RandomStream shifts(0x51ed2701u, {q.qmc_points, q.qmc_shifts});
  for (std::size_t s = 0; s < q.qmc_shifts; ++s) {
    out.groups.push_back(out.size());
    const double sx = shifts.uniform();
    const double sy = shifts.uniform();
    for (const auto& p : quadrature::shifted_kronecker_2d(per_shift, sx, sy)) {
      const double x = box.lo[0] + box.extent(0) * p[0];
      const double y = box.lo[1] + box.extent(1) * p[1];
      // Zero-weight nodes are kept so every shift has the same layout.
      out.add(x, y, w0 * f.eval(Point(x, y)), 2);
    }
  }
  out.groups.push_back(out.size());
  return out;
}

// Sorted interior breakpoints of a 1-D density plus its support ends.
void density_breakpoints(const Density& f, std::vector<double>& out) {
  const auto& kind = f.kind();
  if (const auto* m = std::get_if<dk::Mixture>(&kind)) {
    for (const auto& c : m->components) density_breakpoints(c, out);
    return;
  }
  if (const auto* g = std::get_if<dk::Grid>(&kind)) {
    const double dx = g->bbox.extent(0) / double(g->nx);
    for (std::size_t i = 0; i <= g->nx; ++i) out.push_back(g->bbox.lo[0] + double(i) * dx);
    return;
  }
  const Box b = f.support_bounds();
  out.push_back(b.lo[0]);
  out.push_back(b.hi[0]);
  if (const auto* gs = std::get_if<dk::Gaussian>(&kind)) out.push_back(gs->mean[0]);
}

constexpr double kFdRelTolFloor = 1e-7;

bool is_point_mass(const Density& f) { return std::holds_alternative<dk::PointMass>(f.kind()); }

// Rician kernels and Rayleigh kernels with h = 0 and non-even r are not
// smooth at the UAV's ground position.
bool kinked_at_uav(const ChannelModel& ch) {
  if (std::holds_alternative<RicianParams>(ch)) return true;
  const auto& p = std::get<RayleighParams>(ch);
  const double half_r = 0.5 * p.path_loss_exponent;
  return p.altitude == 0.0 && half_r != std::floor(half_r);
}

// Which integrand to evaluate at the nodes.
struct Request {
  enum class Mode { outage, gradient, local, success };
  Mode mode = Mode::outage;
  const std::vector<Point>* positions = nullptr;
  std::size_t index = 0;                 // local: the UAV
  std::vector<std::size_t> neighbours;   // local: j != index within D_c
  int dim = 1;

  std::size_t components() const {
    switch (mode) {
      case Mode::outage:
      case Mode::success:
        return 1;
      case Mode::gradient:
        return 1 + positions->size() * std::size_t(dim);
      case Mode::local:
        return 1 + std::size_t(dim);
    }
    return 1;
  }
};

}  // namespace

struct Objective::Impl {
  Impl(Density density, ChannelModel channel, QuadratureSpec spec)
      : f(std::move(density)), ch(std::move(channel)), q(spec) {}

  Density f;
  ChannelModel ch;
  QuadratureSpec q;
  int dim = 1;
  double fd_step = 0.0;  // radial step for Rician slopes
  // ln(outage) against ground distance on [0, table_reach]; empty when exact.
  std::optional<boost::math::interpolators::cardinal_cubic_b_spline<double>> table;
  double table_reach = 0.0;
  NodeSet fixed;         // d = 2 methods, or point masses
  NodeSet coarse;        // gauss_legendre_2d error estimate
  bool uses_fixed = false;
  std::vector<double> breakpoints;  // adaptive_1d base partition
  Box support;

  // q = outage factor of UAV u at each node; psi such that d q / d u = -psi (x - u).
  void factors(kernels::NodeView nodes, const Point& u, std::span<double> q,
               std::span<double> psi, bool want_slope) const {
    if (const auto* r = std::get_if<RayleighParams>(&ch)) {
      const kernels::RayleighKernel k{r->lambda, 0.5 * r->path_loss_exponent,
                                      r->altitude * r->altitude};
      const auto isa = kernels::active_isa();
      if (want_slope) {
        kernels::rayleigh_outage_and_slope(isa, nodes, u, k, q, psi);
      } else {
        std::fill(q.begin(), q.end(), 1.0);
        kernels::multiply_rayleigh_outage(isa, nodes, u, k, q);
      }
      return;
    }
    const auto& p = std::get<RicianParams>(ch);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double dx = nodes.xs[k] - u[0];
      const double dy = nodes.ys.empty() ? 0.0 : nodes.ys[k] - u[1];
      const double d = std::sqrt(dx * dx + dy * dy);
      if (table && d <= table_reach) {
        q[k] = std::exp((*table)(d));
        if (want_slope) psi[k] = d > 0.0 ? q[k] * table->prime(d) / d : 0.0;
        continue;
      }
      q[k] = rician_outage_at(d, p);
      if (!want_slope) continue;
      if (d < fd_step) {
        psi[k] = 0.0;
      } else {
        const double up = rician_outage_at(d + fd_step, p);
        const double down = rician_outage_at(d - fd_step, p);
        psi[k] = (up - down) / (2.0 * fd_step) / d;
      }
    }
  }

  // out[c * m + k] = component c at node k, multiplied by mult[k].
  void evaluate(const Request& req, kernels::NodeView nodes, std::span<const double> mult,
                std::vector<double>& out) const {
    const std::size_t m = nodes.size();
    const auto& pos = *req.positions;
    const std::size_t n = pos.size();
    out.assign(req.components() * m, 0.0);
    std::vector<double> q(m), psi(m);

    switch (req.mode) {
      case Request::Mode::outage: {
        std::span<double> prod(out.data(), m);
        std::copy(mult.begin(), mult.end(), prod.begin());
        if (const auto* r = std::get_if<RayleighParams>(&ch)) {
          const kernels::RayleighKernel k{r->lambda, 0.5 * r->path_loss_exponent,
                                          r->altitude * r->altitude};
          for (const auto& u : pos) kernels::multiply_rayleigh_outage(kernels::active_isa(), nodes, u, k, prod);
        } else {
          for (const auto& u : pos) {
            factors(nodes, u, q, psi, false);
            for (std::size_t k = 0; k < m; ++k) prod[k] *= q[k];
          }
        }
        return;
      }
      case Request::Mode::success: {
        for (std::size_t k = 0; k < m; ++k) {
          const double dx = nodes.xs[k] - pos[0][0];
          const double dy = nodes.ys.empty() ? 0.0 : nodes.ys[k] - pos[0][1];
          out[k] = mult[k] * success_at(std::sqrt(dx * dx + dy * dy), ch);
        }
        return;
      }
      case Request::Mode::local: {
        const Point& u = pos[req.index];
        std::vector<double> others(mult.begin(), mult.end());
        for (std::size_t j : req.neighbours) {
          factors(nodes, pos[j], q, psi, false);
          for (std::size_t k = 0; k < m; ++k) others[k] *= q[k];
        }
        factors(nodes, u, q, psi, true);
        for (std::size_t k = 0; k < m; ++k) {
          out[k] = others[k] * q[k];
          const double common = -psi[k] * others[k];
          out[m + k] = common * (nodes.xs[k] - u[0]);
          if (req.dim == 2) out[2 * m + k] = common * (nodes.ys[k] - u[1]);
        }
        return;
      }
      case Request::Mode::gradient: {
        std::vector<double> qs(n * m), psis(n * m);
        for (std::size_t i = 0; i < n; ++i)
          factors(nodes, pos[i], std::span<double>(qs.data() + i * m, m),
                  std::span<double>(psis.data() + i * m, m), true);
        // suffix[i] = prod_{j >= i} q_j, built without division so zeros are safe.
        std::vector<double> suffix((n + 1) * m, 1.0);
        for (std::size_t i = n; i-- > 0;)
          for (std::size_t k = 0; k < m; ++k)
            suffix[i * m + k] = suffix[(i + 1) * m + k] * qs[i * m + k];
        std::vector<double> prefix(mult.begin(), mult.end());
        for (std::size_t k = 0; k < m; ++k) out[k] = mult[k] * suffix[k];
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t c = 1 + i * std::size_t(req.dim);
          for (std::size_t k = 0; k < m; ++k) {
            const double common = -psis[i * m + k] * prefix[k] * suffix[(i + 1) * m + k];
            out[c * m + k] = common * (nodes.xs[k] - pos[i][0]);
            if (req.dim == 2) out[(c + 1) * m + k] = common * (nodes.ys[k] - pos[i][1]);
          }
          for (std::size_t k = 0; k < m; ++k) prefix[k] *= qs[i * m + k];
        }
        return;
      }
    }
  }

  // Integrate all components over a fixed node set.
  std::vector<double> integrate_fixed(const Request& req, const NodeSet& nodes) const {
    std::vector<double> vals;
    evaluate(req, nodes.view(), nodes.w, vals);
    const std::size_t m = nodes.size();
    std::vector<double> result(req.components());
    for (std::size_t c = 0; c < result.size(); ++c)
      result[c] = quadrature::pairwise_sum(std::span<const double>(vals.data() + c * m, m));
    return result;
  }

  struct AdaptiveOutput {
    std::vector<double> value, error;
  };

  AdaptiveOutput integrate_adaptive(const Request& req, double lo, double hi,
                                    std::vector<double> cuts) const;

  NodeSet disk_nodes(const Point& centre, double radius) const {
    NodeSet out;
    const auto& gr = quadrature::gauss_legendre(q.disk_radial);
    const double step = 2.0 * std::numbers::pi / double(q.disk_angular);
    for (std::size_t a = 0; a < q.disk_angular; ++a) {
      const double phi = (double(a) + 0.5) * step;
      const double c = std::cos(phi), s = std::sin(phi);
      for (std::size_t r = 0; r < q.disk_radial; ++r) {
        const double rho = 0.5 * radius * (1.0 + gr.nodes[r]);
        const double x = centre[0] + rho * c, y = centre[1] + rho * s;
        const double w = 0.5 * radius * gr.weights[r] * rho * step * f.eval(Point(x, y));
        if (w != 0.0) out.add(x, y, w, 2);
      }
    }
    return out;
  }
};

Objective::Impl::AdaptiveOutput Objective::Impl::integrate_adaptive(
    const Request& req, double lo, double hi, std::vector<double> cuts) const {
  using GK = quadrature::GaussKronrod15;
  const std::size_t C = req.components();
  AdaptiveOutput out{std::vector<double>(C, 0.0), std::vector<double>(C, 0.0)};
  if (!(hi > lo)) return out;
  const double width = hi - lo;
  const double min_width = 1e-13 * width;
  // Finite-difference slopes carry ~1e-9 relative noise; don't chase it.
  const bool fd_noise = std::holds_alternative<RicianParams>(ch) && !table &&
                        (req.mode == Request::Mode::gradient || req.mode == Request::Mode::local);
  const double rel_tol = fd_noise ? std::max(q.target_rel_tol, kFdRelTolFloor) : q.target_rel_tol;

  // Base partition: base_panels equal panels plus the requested cut points.
  for (std::size_t i = 0; i <= q.base_panels; ++i)
    cuts.push_back(lo + width * double(i) / double(q.base_panels));
  std::erase_if(cuts, [&](double c) { return !(c >= lo && c <= hi); });
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> edges;
  for (double c : cuts)
    if (edges.empty() || c - edges.back() > 1e-12 * width) edges.push_back(c);
  if (edges.back() != hi) edges.back() = hi;

  struct Panel {
    double a, b;
    std::vector<double> kron, err, absval;
    bool splittable = true;
  };
  std::vector<Panel> panels;
  std::vector<std::pair<double, double>> pending;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) pending.emplace_back(edges[i], edges[i + 1]);

  std::size_t evaluations = 0;
  std::vector<double> xs, mult, vals;
  std::vector<double> total(C), total_err(C), total_abs(C);
  while (true) {
    // Evaluate all pending panels in one batch.
    const std::size_t m = pending.size() * 15;
    if (evaluations + m > q.max_evals) {
      throw QuadratureError("adaptive quadrature exceeded " + std::to_string(q.max_evals) +
                                " evaluations",
                            total.empty() ? 0.0 : total[0], total_err.empty() ? 0.0 : total_err[0]);
    }
    evaluations += m;
    xs.resize(m);
    mult.resize(m);
    for (std::size_t p = 0; p < pending.size(); ++p) {
      const double mid = 0.5 * (pending[p].first + pending[p].second);
      const double half = 0.5 * (pending[p].second - pending[p].first);
      for (std::size_t j = 0; j < 7; ++j) {
        xs[p * 15 + 2 * j] = mid - half * GK::nodes[j];
        xs[p * 15 + 2 * j + 1] = mid + half * GK::nodes[j];
      }
      xs[p * 15 + 14] = mid;
    }
    for (std::size_t k = 0; k < m; ++k) mult[k] = f.eval(Point(xs[k]));
    evaluate(req, kernels::NodeView{xs, {}}, mult, vals);

    std::vector<Panel> fresh;
    fresh.reserve(pending.size());
    for (std::size_t p = 0; p < pending.size(); ++p) {
      Panel panel{pending[p].first, pending[p].second, std::vector<double>(C),
                  std::vector<double>(C), std::vector<double>(C)};
      const double half = 0.5 * (panel.b - panel.a);
      panel.splittable = half > 0.5 * min_width;
      for (std::size_t c = 0; c < C; ++c) {
        const double* v = vals.data() + c * m + p * 15;
        double kron = GK::kronrod_weights[7] * v[14];
        double gauss = GK::gauss_weights[3] * v[14];
        double absk = GK::kronrod_weights[7] * std::abs(v[14]);
        for (std::size_t j = 0; j < 7; ++j) {
          const double pair = v[2 * j] + v[2 * j + 1];
          kron += GK::kronrod_weights[j] * pair;
          absk += GK::kronrod_weights[j] * (std::abs(v[2 * j]) + std::abs(v[2 * j + 1]));
          if (j % 2 == 1) gauss += GK::gauss_weights[j / 2] * pair;
        }
        panel.kron[c] = kron * half;
        panel.err[c] = std::abs((kron - gauss) * half);
        panel.absval[c] = absk * half;
      }
      fresh.push_back(std::move(panel));
    }

    // Merge, keeping panels ordered by position.
    std::vector<Panel> merged;
    merged.reserve(panels.size() + fresh.size());
    std::merge(std::make_move_iterator(panels.begin()), std::make_move_iterator(panels.end()),
               std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()),
               std::back_inserter(merged), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    panels = std::move(merged);

    std::fill(total.begin(), total.end(), 0.0);
    std::fill(total_err.begin(), total_err.end(), 0.0);
    std::fill(total_abs.begin(), total_abs.end(), 0.0);
    for (const auto& p : panels)
      for (std::size_t c = 0; c < C; ++c) {
        total[c] += p.kron[c];
        total_err[c] += p.err[c];
        total_abs[c] += p.absval[c];
      }
    std::vector<double> tol(C);
    bool converged = true;
    for (std::size_t c = 0; c < C; ++c) {
      tol[c] = rel_tol * total_abs[c];
      if (total_err[c] > tol[c]) converged = false;
    }
    if (converged) break;

    // Split panels whose error exceeds their share of an unmet tolerance.
    std::vector<bool> split(panels.size(), false);
    bool any = false;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      if (!panels[i].splittable) continue;
      const double share = (panels[i].b - panels[i].a) / width;
      for (std::size_t c = 0; c < C; ++c)
        if (total_err[c] > tol[c] && panels[i].err[c] > tol[c] * share) {
          split[i] = true;
          any = true;
          break;
        }
    }
    if (!any) {
      double worst = 0.0;
      std::size_t at = panels.size();
      for (std::size_t i = 0; i < panels.size(); ++i) {
        if (!panels[i].splittable) continue;
        double score = 0.0;
        for (std::size_t c = 0; c < C; ++c)
          if (tol[c] > 0.0) score = std::max(score, panels[i].err[c] / tol[c]);
        if (score > worst) {
          worst = score;
          at = i;
        }
      }
      if (at == panels.size()) break;  // nothing left to refine
      split[at] = true;
    }
    pending.clear();
    std::vector<Panel> kept;
    kept.reserve(panels.size());
    for (std::size_t i = 0; i < panels.size(); ++i) {
      if (!split[i]) {
        kept.push_back(std::move(panels[i]));
        continue;
      }
      const double mid = 0.5 * (panels[i].a + panels[i].b);
      pending.emplace_back(panels[i].a, mid);
      pending.emplace_back(mid, panels[i].b);
    }
    panels = std::move(kept);
  }

  // Final totals by fixed-order pairwise summation over the ordered panels.
  std::vector<double> column(panels.size());
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < panels.size(); ++i) column[i] = panels[i].kron[c];
    out.value[c] = quadrature::pairwise_sum(column);
    for (std::size_t i = 0; i < panels.size(); ++i) column[i] = panels[i].err[c];
    out.error[c] = quadrature::pairwise_sum(column);
  }
  return out;
}

namespace {

std::vector<std::size_t> canonical_order(const std::vector<Point>& pos) {
  std::vector<std::size_t> order(pos.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pos[a].c < pos[b].c;
  });
  return order;
}

bool disk_covers(const Box& box, const Point& centre, double radius) {
  if (std::isinf(radius)) return true;
  const int corners = box.dim == 1 ? 2 : 4;
  for (int k = 0; k < corners; ++k) {
    Point c = box.dim == 1 ? Point(box.lo[0]) : Point(box.lo[0], box.lo[1]);
    if (k & 1) c[0] = box.hi[0];
    if (k & 2) c[1] = box.hi[1];
    if (distance(c, centre) > radius) return false;
  }
  return true;
}

void require_deployment(const Deployment& U, int dim) {
  if (U.size() == 0) throw std::invalid_argument("deployment is empty");
  if (U.dim() != dim)
    throw std::invalid_argument("deployment dimension " + std::to_string(U.dim()) +
                                " does not match density dimension " + std::to_string(dim));
}

void require_radius(double r, const char* what) {
  if (!(r > 0.0)) throw std::invalid_argument(std::string(what) + " must be > 0");
}

}  // namespace

std::string method_name(QuadratureSpec::Method m) {
  switch (m) {
    case QuadratureSpec::Method::adaptive_1d:
      return "adaptive_1d";
    case QuadratureSpec::Method::gauss_legendre_2d:
      return "gauss_legendre_2d";
    case QuadratureSpec::Method::qmc_2d:
      return "qmc_2d";
  }
  return "unknown";
}

QuadratureSpec::Method parse_method(const std::string& name) {
  if (name == "adaptive_1d") return QuadratureSpec::Method::adaptive_1d;
  if (name == "gauss_legendre_2d") return QuadratureSpec::Method::gauss_legendre_2d;
  if (name == "qmc_2d") return QuadratureSpec::Method::qmc_2d;
  throw std::invalid_argument("unknown quadrature method: " + name);
}

QuadratureSpec QuadratureSpec::defaults_for(int dim) {
  QuadratureSpec q;
  q.method = dim == 1 ? Method::adaptive_1d : Method::gauss_legendre_2d;
  return q;
}

void QuadratureSpec::validate(int dim) const {
  if (!(target_rel_tol > 0.0)) throw std::invalid_argument("quadrature: target_rel_tol must be > 0");
  if ((method == Method::adaptive_1d) != (dim == 1))
    throw std::invalid_argument("quadrature method " + method_name(method) +
                                " does not apply to dimension " + std::to_string(dim));
  if (rician_table == 1 || rician_table == 2 || rician_table == 3)
    throw std::invalid_argument("quadrature: rician_table needs 0 (off) or >= 4 points");
  if (max_evals < 15 || base_panels == 0 || nodes_per_axis == 0 || disk_radial == 0 ||
      disk_angular == 0)
    throw std::invalid_argument("quadrature: node counts must be positive");
  if (qmc_shifts < 2 || qmc_points < qmc_shifts)
    throw std::invalid_argument("quadrature: qmc needs >= 2 shifts and points >= shifts");
}

std::string QuadratureSpec::describe() const {
  std::ostringstream out;
  out << method_name(method);
  switch (method) {
    case Method::adaptive_1d:
      out << " rel_tol=" << target_rel_tol << " base_panels=" << base_panels
          << " max_evals=" << max_evals;
      break;
    case Method::gauss_legendre_2d:
      out << " nodes_per_axis=" << nodes_per_axis;
      break;
    case Method::qmc_2d:
      out << " points=" << qmc_points << " shifts=" << qmc_shifts;
      break;
  }
  if (method != Method::adaptive_1d)
    out << " disk=" << disk_radial << "x" << disk_angular;
  if (rician_table > 0) out << " rician_table=" << rician_table;
  return out.str();
}

Objective::Objective(Density f, ChannelModel ch, QuadratureSpec q)
    : f_(std::move(f)), ch_(std::move(ch)), q_(q) {
  uavplace::validate(ch_);
  q_.validate(f_.dim());
  auto impl = std::make_shared<Impl>(f_, ch_, q_);
  impl->dim = f_.dim();
  impl->support = f_.support_bounds();
  const double scale = impl->support.max_extent();
  impl->fd_step = 1e-6 * (scale > 0.0 ? scale : 1.0);
  if (const auto* p = std::get_if<RicianParams>(&ch_); p && q_.rician_table > 0 && p->altitude > 0.0) {
    const Box& b = impl->support;
    const double reach = 2.0 * std::hypot(b.extent(0), impl->dim == 2 ? b.extent(1) : 0.0);
    const std::size_t m = q_.rician_table;
    const double step = reach / double(m - 1);
    std::vector<double> log_outage(m);
    bool usable = reach > 0.0;
    for (std::size_t k = 0; k < m && usable; ++k) {
      const double v = rician_outage_at(step * double(k), *p);
      usable = v > 0.0 && std::isfinite(v);
      log_outage[k] = std::log(v);
    }
    if (usable) {
      impl->table.emplace(log_outage.begin(), log_outage.end(), 0.0, step);
      impl->table_reach = reach;
    }
  }
  if (is_point_mass(f_)) {
    const Point at = std::get<dk::PointMass>(f_.kind()).at;
    impl->fixed.add(at[0], at[1], 1.0, impl->dim);
    impl->uses_fixed = true;
  } else if (q_.method == QuadratureSpec::Method::gauss_legendre_2d) {
    append_density_nodes_2d(impl->fixed, f_, q_.nodes_per_axis, 1.0);
    const auto coarse_order = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(2.0 * double(q_.nodes_per_axis) / 3.0)));
    append_density_nodes_2d(impl->coarse, f_, coarse_order, 1.0);
    impl->uses_fixed = true;
  } else if (q_.method == QuadratureSpec::Method::qmc_2d) {
    impl->fixed = qmc_nodes(f_, q_);
    impl->uses_fixed = true;
  } else {
    density_breakpoints(f_, impl->breakpoints);
  }
  impl_ = std::move(impl);
}

Objective::~Objective() = default;
Objective::Objective(const Objective&) = default;
Objective& Objective::operator=(const Objective&) = default;
Objective::Objective(Objective&&) noexcept = default;
Objective& Objective::operator=(Objective&&) noexcept = default;

double Objective::length_scale() const {
  const double s = impl_->support.max_extent();
  return s > 0.0 ? s : 1.0;
}

OutageEstimate Objective::outage_with_error(const Deployment& U) const {
  require_deployment(U, dim());
  const std::vector<Point> pos = U.canonical().positions();
  Request req;
  req.mode = Request::Mode::outage;
  req.positions = &pos;
  req.dim = dim();
  OutageEstimate est;
  const Impl& im = *impl_;
  if (im.uses_fixed) {
    std::vector<double> vals;
    im.evaluate(req, im.fixed.view(), im.fixed.w, vals);
    est.value = quadrature::pairwise_sum(vals);
    if (!im.coarse.xs.empty()) {
      est.error = std::abs(est.value - im.integrate_fixed(req, im.coarse)[0]);
    } else if (!im.fixed.groups.empty()) {
      const std::size_t shifts = im.fixed.groups.size() - 1;
      std::vector<double> per(shifts);
      for (std::size_t s = 0; s < shifts; ++s)
        per[s] = double(shifts) *
                 quadrature::pairwise_sum(std::span<const double>(
                     vals.data() + im.fixed.groups[s], im.fixed.groups[s + 1] - im.fixed.groups[s]));
      const double mean = std::accumulate(per.begin(), per.end(), 0.0) / double(shifts);
      double ss = 0.0;
      for (double v : per) ss += (v - mean) * (v - mean);
      est.error = std::sqrt(ss / double(shifts - 1) / double(shifts));
    }
  } else {
    std::vector<double> cuts = im.breakpoints;
    if (kinked_at_uav(ch_))
      for (const auto& u : pos) cuts.push_back(u[0]);
    const auto r = im.integrate_adaptive(req, im.support.lo[0], im.support.hi[0], cuts);
    est.value = r.value[0];
    est.error = r.error[0];
  }
  est.value = std::clamp(est.value, 0.0, 1.0);
  return est;
}

double Objective::outage(const Deployment& U) const { return outage_with_error(U).value; }

std::vector<Point> Objective::gradient(const Deployment& U) const {
  double value = 0.0;
  return gradient_and_outage(U, value);
}

std::vector<Point> Objective::gradient_and_outage(const Deployment& U, double& value) const {
  require_deployment(U, dim());
  const auto order = canonical_order(U.positions());
  std::vector<Point> pos;
  pos.reserve(U.size());
  for (std::size_t i : order) pos.push_back(U[i]);
  Request req;
  req.mode = Request::Mode::gradient;
  req.positions = &pos;
  req.dim = dim();
  const Impl& im = *impl_;
  std::vector<double> comps;
  if (im.uses_fixed) {
    comps = im.integrate_fixed(req, im.fixed);
  } else {
    std::vector<double> cuts = im.breakpoints;
    if (kinked_at_uav(ch_))
      for (const auto& u : pos) cuts.push_back(u[0]);
    comps = im.integrate_adaptive(req, im.support.lo[0], im.support.hi[0], cuts).value;
  }
  value = comps[0];
  std::vector<Point> out(U.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t c = 1 + k * std::size_t(dim());
    out[order[k]] = dim() == 1 ? Point(comps[c]) : Point(comps[c], comps[c + 1]);
  }
  return out;
}

LocalTerms Objective::local_terms(std::size_t i, const Deployment& U, double sensing_radius,
                                 double comm_radius) const {
  require_deployment(U, dim());
  if (i >= U.size()) throw std::out_of_range("local_gradient: UAV index out of range");
  require_radius(sensing_radius, "sensing radius D_s");
  require_radius(comm_radius, "communication radius D_c");
  const std::vector<Point>& pos = U.positions();
  std::vector<std::size_t> neighbours;
  for (std::size_t j = 0; j < pos.size(); ++j)
    if (j != i && distance(pos[j], pos[i]) <= comm_radius) neighbours.push_back(j);
  return local_terms_over(i, pos, pos[i], sensing_radius, std::move(neighbours));
}

double Objective::local_objective_at(std::size_t i, const Deployment& U, const Point& centre,
                                     double sensing_radius,
                                     const std::vector<std::size_t>& neighbours) const {
  require_deployment(U, dim());
  if (i >= U.size()) throw std::out_of_range("local_objective_at: UAV index out of range");
  require_radius(sensing_radius, "sensing radius D_s");
  require_same_dim(centre, U[i]);
  for (std::size_t j : neighbours)
    if (j >= U.size() || j == i)
      throw std::out_of_range("local_objective_at: bad neighbour index");
  return local_terms_over(i, U.positions(), centre, sensing_radius, neighbours).local_objective;
}

LocalTerms Objective::local_terms_over(std::size_t i, const std::vector<Point>& pos,
                                       const Point& centre, double sensing_radius,
                                       std::vector<std::size_t> neighbours) const {
  const Point& u = pos[i];
  Request req;
  req.mode = Request::Mode::local;
  req.positions = &pos;
  req.index = i;
  req.dim = dim();
  req.neighbours = std::move(neighbours);

  const Impl& im = *impl_;
  const bool covers = disk_covers(im.support, centre, sensing_radius);
  std::vector<double> comps;
  if (im.uses_fixed) {
    if (covers) {
      comps = im.integrate_fixed(req, im.fixed);
    } else if (is_point_mass(f_)) {
      NodeSet inside;
      for (std::size_t k = 0; k < im.fixed.size(); ++k) {
        const Point x = dim() == 1 ? Point(im.fixed.xs[k]) : Point(im.fixed.xs[k], im.fixed.ys[k]);
        if (distance(x, centre) <= sensing_radius) inside.add(x[0], x[1], im.fixed.w[k], dim());
      }
      comps = inside.size() == 0 ? std::vector<double>(req.components(), 0.0)
                                 : im.integrate_fixed(req, inside);
    } else {
      comps = im.integrate_fixed(req, im.disk_nodes(centre, sensing_radius));
    }
  } else {
    const double lo =
        covers ? im.support.lo[0] : std::max(im.support.lo[0], centre[0] - sensing_radius);
    const double hi =
        covers ? im.support.hi[0] : std::min(im.support.hi[0], centre[0] + sensing_radius);
    std::vector<double> cuts = im.breakpoints;
    cuts.push_back(u[0]);
    if (kinked_at_uav(ch_))
      for (std::size_t j : req.neighbours) cuts.push_back(pos[j][0]);
    comps = im.integrate_adaptive(req, lo, hi, cuts).value;
  }
  LocalTerms out;
  out.local_objective = comps[0];
  out.gradient = dim() == 1 ? Point(comps[1]) : Point(comps[1], comps[2]);
  return out;
}

std::vector<LocalTerms> Objective::local_terms_all(const Deployment& U, double sensing_radius,
                                                   double comm_radius) const {
  require_deployment(U, dim());
  require_radius(sensing_radius, "sensing radius D_s");
  require_radius(comm_radius, "communication radius D_c");
  bool full = true;
  for (std::size_t i = 0; i < U.size() && full; ++i) {
    if (!disk_covers(impl_->support, U[i], sensing_radius)) full = false;
    for (std::size_t j = 0; j < U.size() && full; ++j)
      if (distance(U[i], U[j]) > comm_radius) full = false;
  }
  std::vector<LocalTerms> out;
  out.reserve(U.size());
  if (full) {
    double value = 0.0;
    const auto g = gradient_and_outage(U, value);
    for (const auto& gi : g) out.push_back(LocalTerms{gi, value});
    return out;
  }
  for (std::size_t i = 0; i < U.size(); ++i)
    out.push_back(local_terms(i, U, sensing_radius, comm_radius));
  return out;
}

Point Objective::local_gradient(std::size_t i, const Deployment& U, double sensing_radius,
                                double comm_radius) const {
  return local_terms(i, U, sensing_radius, comm_radius).gradient;
}

std::vector<Point> Objective::local_gradients(const Deployment& U, double sensing_radius,
                                              double comm_radius) const {
  std::vector<Point> out;
  for (const auto& t : local_terms_all(U, sensing_radius, comm_radius)) out.push_back(t.gradient);
  return out;
}

double Objective::single_success(const Point& u) const {
  if (u.dim != dim()) throw std::invalid_argument("single_success: dimension mismatch");
  const std::vector<Point> pos{u};
  Request req;
  req.mode = Request::Mode::success;
  req.positions = &pos;
  req.dim = dim();
  const Impl& im = *impl_;
  if (im.uses_fixed) return im.integrate_fixed(req, im.fixed)[0];
  std::vector<double> cuts = im.breakpoints;
  if (kinked_at_uav(ch_)) cuts.push_back(u[0]);
  return im.integrate_adaptive(req, im.support.lo[0], im.support.hi[0], cuts).value[0];
}

double Objective::expectation(const std::function<double(const Point&)>& g) const {
  const Impl& im = *impl_;
  if (im.uses_fixed) {
    const NodeSet& ns = im.fixed;
    std::vector<double> terms(ns.w.size());
    for (std::size_t k = 0; k < ns.w.size(); ++k) {
      const Point x = dim() == 1 ? Point(ns.xs[k]) : Point(ns.xs[k], ns.ys[k]);
      terms[k] = ns.w[k] * g(x);
    }
    return quadrature::pairwise_sum(terms);
  }
  std::vector<double> cuts{im.support.lo[0], im.support.hi[0]};
  for (double c : im.breakpoints)
    if (c > cuts.front() && c < cuts.back()) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto integrand = [&](double x) {
    const Point p(x);
    return g(p) * f_.eval(p);
  };
  std::vector<double> parts;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    parts.push_back(quadrature::integrate_adaptive(integrand, cuts[k], cuts[k + 1], 0.0,
                                                   q_.target_rel_tol, q_.max_evals)
                        .value);
  return quadrature::pairwise_sum(parts);
}

double outage(const Deployment& U, const Density& f, const ChannelModel& ch,
              const QuadratureSpec& q) {
  return Objective(f, ch, q).outage(U);
}

std::vector<Point> gradient(const Deployment& U, const Density& f, const ChannelModel& ch,
                            const QuadratureSpec& q) {
  return Objective(f, ch, q).gradient(U);
}

Point local_gradient(std::size_t i, const Deployment& U, const Density& f,
                     const ChannelModel& ch, double sensing_radius, double comm_radius,
                     const QuadratureSpec& q) {
  return Objective(f, ch, q).local_gradient(i, U, sensing_radius, comm_radius);
}

}  // namespace uavplace
