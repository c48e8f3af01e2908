// SPDX-License-Identifier: Apache-2.0
#include "uavplace/geometry.hpp"

#include <algorithm>

namespace uavplace {

Deployment::Deployment(std::vector<Point> positions) : positions_(std::move(positions)) {
  if (positions_.empty()) throw std::invalid_argument("deployment needs at least one UAV");
  const int d = positions_.front().dim;
  for (const auto& p : positions_)
    if (p.dim != d) throw std::invalid_argument("deployment positions differ in dimension");
}

Deployment Deployment::line(const std::vector<double>& xs) {
  std::vector<Point> pts;
  pts.reserve(xs.size());
  for (double x : xs) pts.emplace_back(x);
  return Deployment(std::move(pts));
}

Deployment Deployment::collapsed(const Point& at, std::size_t n) {
  return Deployment(std::vector<Point>(n, at));
}

Deployment Deployment::canonical() const {
  auto pts = positions_;
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return a.c < b.c; });
  Deployment out;
  out.positions_ = std::move(pts);
  return out;
}

std::vector<double> Deployment::flatten() const {
  std::vector<double> out;
  const int d = dim();
  out.reserve(positions_.size() * static_cast<std::size_t>(d));
  for (const auto& p : positions_)
    for (int a = 0; a < d; ++a) out.push_back(p[a]);
  return out;
}

Deployment Deployment::unflatten(const std::vector<double>& coords, int dim) {
  if (dim < 1 || dim > 2 || coords.size() % static_cast<std::size_t>(dim) != 0)
    throw std::invalid_argument("coordinate count does not match dimension");
  std::vector<Point> pts;
  for (std::size_t k = 0; k < coords.size(); k += static_cast<std::size_t>(dim))
    pts.push_back(dim == 1 ? Point(coords[k]) : Point(coords[k], coords[k + 1]));
  return Deployment(std::move(pts));
}

}  // namespace uavplace
