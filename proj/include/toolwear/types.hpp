#pragma once

#include <Eigen/Core>

namespace toolwear {

template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

using VecXd = Vec<double>;
using MatXd = Mat<double>;
using Index = Eigen::Index;

}  // namespace toolwear
