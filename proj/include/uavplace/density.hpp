// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "uavplace/geometry.hpp"
#include "uavplace/rng.hpp"

namespace uavplace {

class Density;

namespace density_kind {

struct Uniform1D {
  double a = 0.0;
  double b = 1.0;
};

struct UniformBox2D {
  double ax = 0.0, bx = 1.0, ay = 0.0, by = 1.0;
};

/// Axis-aligned Gaussian; variance holds the diagonal of the covariance.
struct Gaussian {
  Point mean;
  std::array<double, 2> variance{1.0, 1.0};
};

struct Mixture {
  std::vector<double> weights;
  std::vector<Density> components;
};

/// Piecewise-constant, cell-centred density map. values are row-major with
/// rows running along y (ny == 1 for d = 1) and are normalised on construction.
struct Grid {
  Box bbox;
  std::size_t nx = 0;
  std::size_t ny = 1;
  std::vector<double> values;

  double cell_measure() const;
  double value(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

/// Degenerate placement law. Only meaningful for sampling and as the law of
/// a random deployment; eval() is zero everywhere.
struct PointMass {
  Point at;
};

}  // namespace density_kind

/// Ground-terminal (or placement) probability law on R^1 or R^2. Immutable.
class Density {
 public:
  using Kind = std::variant<density_kind::Uniform1D, density_kind::UniformBox2D,
                            density_kind::Gaussian, density_kind::Mixture, density_kind::Grid,
                            density_kind::PointMass>;

  static Density uniform1d(double a, double b);
  static Density uniform_box2d(double ax, double bx, double ay, double by);
  static Density gaussian1d(double mean, double variance);
  static Density gaussian2d(Point mean, double var_x, double var_y);
  static Density mixture(std::vector<double> weights, std::vector<Density> components);
  /// Rows along y; values need not be normalised.
  static Density grid(Box bbox, std::size_t nx, std::size_t ny, std::vector<double> values);
  static Density point_mass(Point at);

  int dim() const { return dim_; }
  const Kind& kind() const { return kind_; }
  std::string kind_name() const;

  /// f(x); zero outside the support. Throws on dimension mismatch.
  double eval(const Point& x) const;
  /// Box holding all the mass (Gaussian: mean +- 8 sigma per axis).
  Box support_bounds() const;
  Point sample(RandomStream& rng) const;

  /// Coordinate-wise unimodal with mirror symmetry about a common centre.
  bool is_unimodal() const;
  std::optional<Point> center() const;

  /// Cell-centred rendering on a regular grid over support_bounds().
  Density render_grid(std::size_t cells_per_axis) const;

 private:
  Density(Kind kind, int dim) : kind_(std::move(kind)), dim_(dim) {}

  Kind kind_;
  int dim_ = 1;
};

/// Unimodality scan for piecewise-constant maps. Returns the centre when the
/// grid is coordinate-wise monotone towards a common mirror-symmetry centre.
std::optional<Point> grid_unimodal_center(const density_kind::Grid& grid, double rel_tol = 1e-9);

/// Grid CSV: first line "bbox,x0,x1" (d=1) or "bbox,x0,x1,y0,y1" (d=2), then
/// one comma-separated row of cell values per y (from y0 upwards).
Density load_grid_csv(const std::string& path);
Density parse_grid_csv(const std::string& text);

}  // namespace uavplace
