// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavplace {

/// Thrown when an integral misses its tolerance within the evaluation budget.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial, double error_estimate)
      : std::runtime_error(what), partial_(partial), error_estimate_(error_estimate) {}
  double partial_estimate() const { return partial_; }
  double error_estimate() const { return error_estimate_; }

 private:
  double partial_;
  double error_estimate_;
};

namespace quadrature {

/// 15-point Kronrod abscissae on [-1, 1] (positive half, descending) with the
/// embedded 7-point Gauss rule.
struct GaussKronrod15 {
  static const std::array<double, 8> nodes;          // x_0 .. x_7 (x_7 = 0)
  static const std::array<double, 8> kronrod_weights;
  static const std::array<double, 4> gauss_weights;  // for x_1, x_3, x_5, x_7
};

/// Gauss-Legendre rule of the given order on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached; nodes are computed once per order by Newton iteration.
const GaussLegendre& gauss_legendre(std::size_t order);

/// Fixed-order pairwise summation; the reduction tree depends only on the size.
double pairwise_sum(std::span<const double> values);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (G7/K15) on [a, b] for a scalar function.
/// Stops when error <= max(abs_tol, rel_tol*|value|); throws QuadratureError
/// if max_evals would be exceeded.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, std::size_t max_evals = 200000);

/// Low-discrepancy points in [0,1)^2: the R2 Kronecker sequence with a
/// Cranley-Patterson shift.
std::vector<std::array<double, 2>> shifted_kronecker_2d(std::size_t count, double shift_x,
                                                        double shift_y);

}  // namespace quadrature
}  // namespace uavplace
