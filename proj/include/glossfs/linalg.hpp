#pragma once

#include <Eigen/Dense>
#include <functional>

namespace glossfs {

struct PowerIterationOptions {
  double rel_tol = 1e-8;
  int max_iter = 5000;
  unsigned long long seed = 0x5eed;
};

// Largest eigenvalue of a symmetric PSD operator of dimension `dim` given by
// its action v -> A v. Throws Numerical when max_iter is exhausted.
double spectral_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                     Eigen::Index dim, const PowerIterationOptions& options = {});

// Convenience overload for an explicit symmetric PSD matrix.
double spectral_norm(const Eigen::MatrixXd& a, const PowerIterationOptions& options = {});

// ||A^T A||_2 without forming the larger Gram matrix.
double gram_spectral_norm(const Eigen::MatrixXd& a, const PowerIterationOptions& options = {});

// Minimum-norm least-squares solution B = A^+ C. Singular values of A below
// cutoff_factor * eps * sigma_max are treated as zero.
Eigen::MatrixXd pinv_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                           double cutoff_factor);

// Orthonormal basis of range(A) using the same singular value cutoff.
Eigen::MatrixXd range_basis(const Eigen::MatrixXd& a, double cutoff_factor);

}  // namespace glossfs
