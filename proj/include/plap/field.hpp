#pragma once

#include <Eigen/Core>

namespace plap {

/// Per-vertex values, indexed like the owning graph's vertices.
template <typename Scalar>
using Field = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using ScalarField = Field<double>;

}  // namespace plap
