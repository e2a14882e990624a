#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace dacc {

using Index = Eigen::Index;

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Points2 = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Position = Point2<double>;
using Points = Points2<double>;
using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

/// Axis-aligned rectangle in meters.
struct Region {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool degenerate() const { return !(width() > 0.0) || !(height() > 0.0); }
  bool contains(const Position& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }

  friend bool operator==(const Region&, const Region&) = default;
};

/// Column-wise Euclidean distances between two point sets (2 x n each).
template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> pairwise_distances(const Eigen::MatrixBase<DerivedA>& a,
                                                      const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  MatrixX<Scalar> d(a.cols(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index i = 0; i < a.cols(); ++i) {
      d(i, j) = (a.col(i) - b.col(j)).norm();
    }
  }
  return d;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> pairwise_distances(const Eigen::MatrixBase<Derived>& a) {
  return pairwise_distances(a, a);
}

/// Distances from one point to every column of a point set.
template <typename DerivedP, typename DerivedQ>
VectorX<typename DerivedQ::Scalar> distances_from(const Eigen::MatrixBase<DerivedP>& p,
                                                  const Eigen::MatrixBase<DerivedQ>& q) {
  return (q.colwise() - p).colwise().norm().transpose();
}

}  // namespace dacc
