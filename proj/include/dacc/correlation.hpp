#pragma once

#include "dacc/topology.hpp"
#include "dacc/types.hpp"

#include <cmath>
#include <concepts>
#include <stdexcept>

namespace dacc {

/// Power-exponential correlation kernel K(d) = exp(-(d / theta1)^theta2).
struct CorrelationModel {
  double theta1 = 1.0;  ///< range parameter (meters), > 0
  double theta2 = 1.0;  ///< smoothness parameter, in (0, 2]

  friend bool operator==(const CorrelationModel&, const CorrelationModel&) = default;
};

/// Throws std::invalid_argument unless theta1 > 0 and theta2 in (0, 2].
void validate(const CorrelationModel& model);

template <std::floating_point Scalar>
Scalar kernel(Scalar d, const CorrelationModel& model) {
  using std::exp;
  using std::pow;
  if (d < Scalar(0)) throw std::invalid_argument("kernel: distance must be >= 0");
  return exp(-pow(d / Scalar(model.theta1), Scalar(model.theta2)));
}

/// Coefficient-wise kernel over an array of non-negative distances.
template <typename Derived>
auto kernel(const Eigen::ArrayBase<Derived>& d, const CorrelationModel& model) {
  using Scalar = typename Derived::Scalar;
  return (-(d / Scalar(model.theta1)).pow(Scalar(model.theta2))).exp();
}

/// Field points in covariance order: the event first, then every node.
Points field_points(const Topology& topology);

/// (m+1) x (m+1) covariance sigma_s2 * K(distance) over field_points().
Matrix covariance_matrix(const Topology& topology, const CorrelationModel& model,
                         double sigma_s2);

class SingularCovarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CholeskyFactor {
  Matrix lower;
  double jitter = 0.0;  ///< absolute diagonal shift that made the factorization succeed
};

/// Lower-triangular L with L * L^T = matrix. On failure the diagonal is
/// shifted by {1e-12, 1e-10, 1e-8} * scale in turn; past the last rung a
/// SingularCovarianceError is thrown. `scale` defaults to the largest
/// diagonal entry (sigma_s2 for a homogeneous field).
CholeskyFactor cholesky(const Matrix& matrix, double scale = 0.0);

}  // namespace dacc
