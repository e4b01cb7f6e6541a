#pragma once

// Brute-force reference implementations. They share nothing with the
// production paths beyond basic matrix arithmetic and are meant for
// verification only.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "glossfs/dataset.hpp"

namespace glossfs::oracle {

struct OracleReport {
  std::string name;
  std::size_t case_count = 0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> failures;

  bool passed() const noexcept { return failures.empty(); }
};

// 1/2 ||x - y||^2 + lambda ||x||_2
double prox_objective(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double lambda);

// Projected subgradient descent with diminishing steps, best iterate kept.
Eigen::VectorXd prox_oracle(const Eigen::VectorXd& y, double lambda, int iters = 100000);

// min_H ||X - X_I H||_F through a column-pivoted QR least-squares solve.
double lsq_residual_oracle(const Eigen::MatrixXd& x, const std::vector<Index>& columns);

// Maximum of sum_i weight(i, perm(i)) over all permutations; c <= 8.
double assignment_oracle(const Eigen::MatrixXd& weight);

// Suites behind the `verify` command. Each draws `cases` random instances.
OracleReport verify_prox(std::size_t cases, std::uint64_t seed, double tol = 1e-6,
                         int iters = 100000);
OracleReport verify_assignment(std::size_t cases, std::uint64_t seed);
OracleReport verify_greedy_residual(std::size_t cases, std::uint64_t seed);

}  // namespace glossfs::oracle
