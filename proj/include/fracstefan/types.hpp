#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace fracstefan {

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Real = double;
using Index = Eigen::Index;
using ArrayXr = ArrayX<Real>;
using VectorXr = VectorX<Real>;
using MatrixXr = MatrixX<Real>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

}  // namespace fracstefan
