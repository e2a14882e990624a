#include "dacc/correlation.hpp"

#include <array>
#include <string>

namespace dacc {

void validate(const CorrelationModel& model) {
  if (!(model.theta1 > 0.0) || !std::isfinite(model.theta1)) {
    throw std::invalid_argument("theta1 must be > 0");
  }
  if (!(model.theta2 > 0.0) || model.theta2 > 2.0) {
    throw std::invalid_argument("theta2 must lie in (0, 2]");
  }
}

Points field_points(const Topology& topology) {
  Points pts(2, topology.size() + 1);
  pts.col(0) = topology.event;
  pts.rightCols(topology.size()) = topology.nodes;
  return pts;
}

Matrix covariance_matrix(const Topology& topology, const CorrelationModel& model,
                         double sigma_s2) {
  validate(model);
  if (!(sigma_s2 > 0.0)) throw std::invalid_argument("sigma_s2 must be > 0");
  const Matrix d = pairwise_distances(field_points(topology));
  return sigma_s2 * kernel(d.array(), model).matrix();
}

CholeskyFactor cholesky(const Matrix& matrix, double scale) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("cholesky: matrix must be square");
  if (!matrix.isApprox(matrix.transpose(), 1e-12) && matrix.size() > 0) {
    throw std::invalid_argument("cholesky: matrix must be symmetric");
  }
  if (scale <= 0.0) scale = matrix.size() > 0 ? matrix.diagonal().maxCoeff() : 1.0;

  Eigen::LLT<Matrix> llt(matrix);
  if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};

  constexpr std::array<double, 3> ladder{1e-12, 1e-10, 1e-8};
  for (double rung : ladder) {
    const double jitter = rung * scale;
    Matrix shifted = matrix;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
  }
  throw SingularCovarianceError("covariance is not positive definite after jitter " +
                                std::to_string(ladder.back() * scale) +
                                " (coincident points with theta2 near 2?)");
}

}  // namespace dacc
