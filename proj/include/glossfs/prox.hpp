#pragma once

#include <Eigen/Dense>

namespace glossfs {

// argmin_{x >= 0} 1/2 ||x - y||^2 + lambda ||x||_2.
//
// Only the strictly positive entries of y survive; their block is shrunk
// toward zero by lambda in norm and vanishes entirely once its norm is at
// most lambda.
Eigen::VectorXd prox_row(const Eigen::Ref<const Eigen::VectorXd>& y, double lambda);

// Row-wise prox_row on a d x K matrix (nonnegative group Lasso).
Eigen::MatrixXd prox_ngl(const Eigen::Ref<const Eigen::MatrixXd>& y, double lambda);

}  // namespace glossfs
