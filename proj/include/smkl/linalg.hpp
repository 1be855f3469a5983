#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace smkl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace smkl
