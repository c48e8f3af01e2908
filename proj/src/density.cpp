// SPDX-License-Identifier: Apache-2.0
#include "uavplace/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace uavplace {

namespace dk = density_kind;

namespace {

constexpr double kGaussianTruncation = 8.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double normal_pdf(double x, double mean, double variance) {
  const double z = x - mean;
  return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

void require_dim(const Point& x, int dim) {
  if (x.dim != dim)
    throw std::invalid_argument("density of dimension " + std::to_string(dim) +
                                " evaluated at a point of dimension " + std::to_string(x.dim));
}

std::size_t cell_index(double v, double lo, double width, std::size_t n) {
  const auto i = static_cast<std::size_t>(std::floor((v - lo) / width));
  return std::min(i, n - 1);
}

// Candidate mirror centres (in half-cell units, 0..2(n-1)) for which row is
// symmetric and non-increasing away from the centre. Zero rows accept all.
std::set<std::size_t> row_centres(const std::vector<double>& row, double tol) {
  const std::size_t n = row.size();
  std::set<std::size_t> out;
  const bool all_zero =
      std::all_of(row.begin(), row.end(), [&](double v) { return std::abs(v) <= tol; });
  for (std::size_t twice_m = 0; twice_m + 1 < 2 * n; ++twice_m) {
    if (all_zero) {
      out.insert(twice_m);
      continue;
    }
    // Offsets k index cells left = (twice_m - odd)/2 - k, right = (twice_m + odd)/2 + k.
    const std::size_t odd = twice_m % 2;
    const auto left0 = static_cast<long>((twice_m - odd) / 2);
    const auto right0 = static_cast<long>((twice_m + odd) / 2);
    auto at = [&](long i) {
      return (i < 0 || i >= static_cast<long>(n)) ? 0.0 : row[static_cast<std::size_t>(i)];
    };
    bool ok = true;
    double prev = std::max(at(left0), at(right0));
    for (long k = 0; ok && (left0 - k >= 0 || right0 + k < static_cast<long>(n)); ++k) {
      const double l = at(left0 - k);
      const double r = at(right0 + k);
      if (std::abs(l - r) > tol) ok = false;
      if (l > prev + tol || r > prev + tol) ok = false;
      prev = std::min(l, r);
    }
    if (ok) out.insert(twice_m);
  }
  return out;
}

std::set<std::size_t> intersect(const std::set<std::size_t>& a, const std::set<std::size_t>& b) {
  std::set<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.begin()));
  return out;
}

}  // namespace

double dk::Grid::cell_measure() const {
  const double dx = bbox.extent(0) / static_cast<double>(nx);
  return bbox.dim == 1 ? dx : dx * bbox.extent(1) / static_cast<double>(ny);
}

Density Density::uniform1d(double a, double b) {
  if (!(b > a)) throw std::invalid_argument("uniform1d requires a < b");
  return Density(dk::Uniform1D{a, b}, 1);
}

Density Density::uniform_box2d(double ax, double bx, double ay, double by) {
  if (!(bx > ax) || !(by > ay)) throw std::invalid_argument("uniform box requires lo < hi");
  return Density(dk::UniformBox2D{ax, bx, ay, by}, 2);
}

Density Density::gaussian1d(double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian variance must be positive");
  return Density(dk::Gaussian{Point(mean), {variance, variance}}, 1);
}

Density Density::gaussian2d(Point mean, double var_x, double var_y) {
  if (mean.dim != 2) throw std::invalid_argument("gaussian2d needs a 2-D mean");
  if (!(var_x > 0.0) || !(var_y > 0.0))
    throw std::invalid_argument("gaussian variance must be positive");
  return Density(dk::Gaussian{mean, {var_x, var_y}}, 2);
}

Density Density::mixture(std::vector<double> weights, std::vector<Density> components) {
  if (weights.empty() || weights.size() != components.size())
    throw std::invalid_argument("mixture needs one weight per component");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("mixture weights must sum to 1");
  const int d = components.front().dim();
  for (const auto& c : components) {
    if (c.dim() != d) throw std::invalid_argument("mixture components differ in dimension");
    if (std::holds_alternative<dk::PointMass>(c.kind()))
      throw std::invalid_argument("point masses cannot be mixed");
  }
  return Density(dk::Mixture{std::move(weights), std::move(components)}, d);
}

Density Density::grid(Box bbox, std::size_t nx, std::size_t ny, std::vector<double> values) {
  if (nx == 0 || ny == 0 || values.size() != nx * ny)
    throw std::invalid_argument("grid value count does not match its shape");
  if (bbox.dim == 1 && ny != 1) throw std::invalid_argument("1-D grid must have a single row");
  if (!(bbox.extent(0) > 0.0) || (bbox.dim == 2 && !(bbox.extent(1) > 0.0)))
    throw std::invalid_argument("grid bounding box is empty");
  dk::Grid g{bbox, nx, ny, std::move(values)};
  double sum = 0.0;
  for (double v : g.values) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("grid values must be finite and nonnegative");
    sum += v;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("grid has no mass");
  const double scale = 1.0 / (sum * g.cell_measure());
  for (double& v : g.values) v *= scale;
  const int d = bbox.dim;
  return Density(std::move(g), d);
}

Density Density::point_mass(Point at) {
  const int d = at.dim;
  return Density(dk::PointMass{at}, d);
}

std::string Density::kind_name() const {
  return std::visit(overloaded{[](const dk::Uniform1D&) { return std::string("uniform1d"); },
                               [](const dk::UniformBox2D&) { return std::string("uniform_box2d"); },
                               [](const dk::Gaussian&) { return std::string("gaussian"); },
                               [](const dk::Mixture&) { return std::string("mixture"); },
                               [](const dk::Grid&) { return std::string("grid"); },
                               [](const dk::PointMass&) { return std::string("point_mass"); }},
                    kind_);
}

double Density::eval(const Point& x) const {
  require_dim(x, dim_);
  return std::visit(
      overloaded{
          [&](const dk::Uniform1D& u) { return (x[0] < u.a || x[0] > u.b) ? 0.0 : 1.0 / (u.b - u.a); },
          [&](const dk::UniformBox2D& u) {
            if (x[0] < u.ax || x[0] > u.bx || x[1] < u.ay || x[1] > u.by) return 0.0;
            return 1.0 / ((u.bx - u.ax) * (u.by - u.ay));
          },
          [&](const dk::Gaussian& g) {
            double v = normal_pdf(x[0], g.mean[0], g.variance[0]);
            if (dim_ == 2) v *= normal_pdf(x[1], g.mean[1], g.variance[1]);
            return v;
          },
          [&](const dk::Mixture& m) {
            double v = 0.0;
            for (std::size_t k = 0; k < m.weights.size(); ++k)
              v += m.weights[k] * m.components[k].eval(x);
            return v;
          },
          [&](const dk::Grid& g) {
            if (!g.bbox.contains(x)) return 0.0;
            const auto ix = cell_index(x[0], g.bbox.lo[0], g.bbox.extent(0) / double(g.nx), g.nx);
            std::size_t iy = 0;
            if (dim_ == 2) iy = cell_index(x[1], g.bbox.lo[1], g.bbox.extent(1) / double(g.ny), g.ny);
            return g.value(ix, iy);
          },
          [&](const dk::PointMass&) { return 0.0; }},
      kind_);
}

Box Density::support_bounds() const {
  return std::visit(
      overloaded{[](const dk::Uniform1D& u) { return Box::interval(u.a, u.b); },
                 [](const dk::UniformBox2D& u) { return Box::rect(u.ax, u.bx, u.ay, u.by); },
                 [&](const dk::Gaussian& g) {
                   const double sx = kGaussianTruncation * std::sqrt(g.variance[0]);
                   if (dim_ == 1) return Box::interval(g.mean[0] - sx, g.mean[0] + sx);
                   const double sy = kGaussianTruncation * std::sqrt(g.variance[1]);
                   return Box::rect(g.mean[0] - sx, g.mean[0] + sx, g.mean[1] - sy, g.mean[1] + sy);
                 },
                 [](const dk::Mixture& m) {
                   Box b = m.components.front().support_bounds();
                   for (const auto& c : m.components) b = hull(b, c.support_bounds());
                   return b;
                 },
                 [](const dk::Grid& g) { return g.bbox; },
                 [&](const dk::PointMass& p) {
                   return dim_ == 1 ? Box::interval(p.at[0], p.at[0])
                                    : Box::rect(p.at[0], p.at[0], p.at[1], p.at[1]);
                 }},
      kind_);
}

Point Density::sample(RandomStream& rng) const {
  return std::visit(
      overloaded{
          [&](const dk::Uniform1D& u) { return Point(rng.uniform(u.a, u.b)); },
          [&](const dk::UniformBox2D& u) {
            const double x = rng.uniform(u.ax, u.bx);
            return Point(x, rng.uniform(u.ay, u.by));
          },
          [&](const dk::Gaussian& g) {
            const double x = g.mean[0] + std::sqrt(g.variance[0]) * rng.normal();
            if (dim_ == 1) return Point(x);
            return Point(x, g.mean[1] + std::sqrt(g.variance[1]) * rng.normal());
          },
          [&](const dk::Mixture& m) {
            const double pick = rng.uniform();
            double acc = 0.0;
            std::size_t k = 0;
            for (; k + 1 < m.weights.size(); ++k) {
              acc += m.weights[k];
              if (pick < acc) break;
            }
            return m.components[k].sample(rng);
          },
          [&](const dk::Grid& g) {
            const double cell = g.cell_measure();
            const double pick = rng.uniform();
            double acc = 0.0;
            std::size_t idx = 0;
            for (; idx + 1 < g.values.size(); ++idx) {
              acc += g.values[idx] * cell;
              if (pick < acc) break;
            }
            const std::size_t ix = idx % g.nx;
            const std::size_t iy = idx / g.nx;
            const double dx = g.bbox.extent(0) / double(g.nx);
            const double x = g.bbox.lo[0] + (double(ix) + rng.uniform()) * dx;
            if (dim_ == 1) return Point(x);
            const double dy = g.bbox.extent(1) / double(g.ny);
            return Point(x, g.bbox.lo[1] + (double(iy) + rng.uniform()) * dy);
          },
          [&](const dk::PointMass& p) { return p.at; }},
      kind_);
}

std::optional<Point> grid_unimodal_center(const dk::Grid& grid, double rel_tol) {
  const double peak = *std::max_element(grid.values.begin(), grid.values.end());
  const double tol = rel_tol * peak;
  std::set<std::size_t> cx;
  bool first = true;
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    std::vector<double> row(grid.values.begin() + static_cast<long>(iy * grid.nx),
                            grid.values.begin() + static_cast<long>((iy + 1) * grid.nx));
    auto c = row_centres(row, tol);
    cx = first ? c : intersect(cx, c);
    first = false;
    if (cx.empty()) return std::nullopt;
  }
  const double dx = grid.bbox.extent(0) / double(grid.nx);
  const double x = grid.bbox.lo[0] + (0.5 * double(*cx.begin()) + 0.5) * dx;
  if (grid.bbox.dim == 1) return Point(x);

  std::set<std::size_t> cy;
  first = true;
  for (std::size_t ix = 0; ix < grid.nx; ++ix) {
    std::vector<double> col(grid.ny);
    for (std::size_t iy = 0; iy < grid.ny; ++iy) col[iy] = grid.value(ix, iy);
    auto c = row_centres(col, tol);
    cy = first ? c : intersect(cy, c);
    first = false;
    if (cy.empty()) return std::nullopt;
  }
  const double dy = grid.bbox.extent(1) / double(grid.ny);
  return Point(x, grid.bbox.lo[1] + (0.5 * double(*cy.begin()) + 0.5) * dy);
}

std::optional<Point> Density::center() const {
  return std::visit(
      overloaded{[](const dk::Uniform1D& u) -> std::optional<Point> { return Point(0.5 * (u.a + u.b)); },
                 [](const dk::UniformBox2D& u) -> std::optional<Point> {
                   return Point(0.5 * (u.ax + u.bx), 0.5 * (u.ay + u.by));
                 },
                 [](const dk::Gaussian& g) -> std::optional<Point> { return g.mean; },
                 [&](const dk::Mixture&) -> std::optional<Point> {
                   const auto rendered = render_grid(dim_ == 1 ? 4096 : 256);
                   return grid_unimodal_center(std::get<dk::Grid>(rendered.kind()));
                 },
                 [](const dk::Grid& g) { return grid_unimodal_center(g); },
                 [](const dk::PointMass& p) -> std::optional<Point> { return p.at; }},
      kind_);
}

bool Density::is_unimodal() const { return center().has_value(); }

Density Density::render_grid(std::size_t cells_per_axis) const {
  if (std::holds_alternative<dk::PointMass>(kind_))
    throw std::invalid_argument("a point mass has no density to render");
  const Box b = support_bounds();
  const std::size_t nx = cells_per_axis;
  const std::size_t ny = dim_ == 1 ? 1 : cells_per_axis;
  const double dx = b.extent(0) / double(nx);
  const double dy = dim_ == 1 ? 0.0 : b.extent(1) / double(ny);
  std::vector<double> values(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double x = b.lo[0] + (double(ix) + 0.5) * dx;
      const Point p = dim_ == 1 ? Point(x) : Point(x, b.lo[1] + (double(iy) + 0.5) * dy);
      values[iy * nx + ix] = eval(p);
    }
  return grid(b, nx, ny, std::move(values));
}

Density parse_grid_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
  };
  auto to_double = [](const std::string& tok) {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (tok.find_first_not_of(" \t\r", used) != std::string::npos)
      throw std::invalid_argument("malformed number in grid csv: '" + tok + "'");
    return v;
  };
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split(line);
    break;
  }
  if (header.empty() || header[0] != "bbox" || (header.size() != 3 && header.size() != 5))
    throw std::invalid_argument("grid csv must start with 'bbox,x0,x1[,y0,y1]'");
  const int d = header.size() == 3 ? 1 : 2;
  const Box bbox = d == 1 ? Box::interval(to_double(header[1]), to_double(header[2]))
                          : Box::rect(to_double(header[1]), to_double(header[2]),
                                      to_double(header[3]), to_double(header[4]));
  std::vector<double> values;
  std::size_t nx = 0, ny = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto toks = split(line);
    if (nx == 0) nx = toks.size();
    if (toks.size() != nx) throw std::invalid_argument("grid csv rows differ in length");
    for (const auto& t : toks) values.push_back(to_double(t));
    ++ny;
  }
  if (ny == 0) throw std::invalid_argument("grid csv has no value rows");
  return Density::grid(bbox, nx, ny, std::move(values));
}

Density load_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid csv: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_grid_csv(buf.str());
}

}  // namespace uavplace
