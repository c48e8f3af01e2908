// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavplace {

/// A ground-plane location in R^1 or R^2. Unused coordinates are zero.
struct Point {
  std::array<double, 2> c{0.0, 0.0};
  int dim = 1;

  Point() = default;
  explicit Point(double x) : c{x, 0.0}, dim(1) {}
  Point(double x, double y) : c{x, y}, dim(2) {}

  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Point&, const Point&) = default;
};

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = a.c[0] - b.c[0];
  const double dy = a.c[1] - b.c[1];
  return dx * dx + dy * dy;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(squared_distance(a, b));
}

inline void require_same_dim(const Point& a, const Point& b) {
  if (a.dim != b.dim)
    throw std::invalid_argument("point dimension mismatch: " + std::to_string(a.dim) +
                                " vs " + std::to_string(b.dim));
}

/// Axis-aligned box; for dim == 1 only the x extent is meaningful.
struct Box {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  int dim = 1;

  static Box interval(double a, double b) { return Box{{a, 0.0}, {b, 0.0}, 1}; }
  static Box rect(double ax, double bx, double ay, double by) {
    return Box{{ax, ay}, {bx, by}, 2};
  }

  double extent(int axis) const {
    return hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)];
  }
  double max_extent() const { return dim == 1 ? extent(0) : std::max(extent(0), extent(1)); }
  double measure() const { return dim == 1 ? extent(0) : extent(0) * extent(1); }
  bool contains(const Point& p) const {
    for (int a = 0; a < dim; ++a)
      if (p[a] < lo[static_cast<std::size_t>(a)] || p[a] > hi[static_cast<std::size_t>(a)])
        return false;
    return true;
  }
  Point clamp(Point p) const {
    for (int a = 0; a < dim; ++a)
      p[a] = std::min(std::max(p[a], lo[static_cast<std::size_t>(a)]),
                      hi[static_cast<std::size_t>(a)]);
    return p;
  }
  Point center() const {
    return dim == 1 ? Point(0.5 * (lo[0] + hi[0]))
                    : Point(0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]));
  }
};

/// Smallest box containing both.
inline Box hull(const Box& a, const Box& b) {
  Box r = a;
  for (std::size_t k = 0; k < 2; ++k) {
    r.lo[k] = std::min(a.lo[k], b.lo[k]);
    r.hi[k] = std::max(a.hi[k], b.hi[k]);
  }
  return r;
}

/// Ground projections of the UAVs; all share the channel's altitude.
class Deployment {
 public:
  Deployment() = default;
  explicit Deployment(std::vector<Point> positions);

  static Deployment line(const std::vector<double>& xs);
  static Deployment collapsed(const Point& at, std::size_t n);

  std::size_t size() const { return positions_.size(); }
  int dim() const { return positions_.empty() ? 0 : positions_.front().dim; }
  const std::vector<Point>& positions() const { return positions_; }
  const Point& operator[](std::size_t i) const { return positions_[i]; }

  /// Lexicographically sorted copy; the outage is symmetric in the UAVs.
  Deployment canonical() const;

  /// Flattened coordinates u_1x, (u_1y,) u_2x, ...
  std::vector<double> flatten() const;
  static Deployment unflatten(const std::vector<double>& coords, int dim);

 private:
  std::vector<Point> positions_;
};

}  // namespace uavplace
