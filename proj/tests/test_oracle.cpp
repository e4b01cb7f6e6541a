#include <doctest.h>

#include "glossfs/error.hpp"
#include "glossfs/oracle.hpp"
#include "glossfs/prox.hpp"
#include "support.hpp"

using namespace glossfs;

TEST_SUITE("oracle") {

TEST_CASE("prox oracle reaches the closed form objective") {
  Eigen::VectorXd y(2);
  y << 3, 4;
  const auto x = oracle::prox_oracle(y, 1.0);
  Eigen::VectorXd closed(2);
  closed << 2.4, 3.2;
  CHECK(std::abs(oracle::prox_objective(x, y, 1.0) - oracle::prox_objective(closed, y, 1.0)) <= 1e-8);

  Eigen::VectorXd neg(3);
  neg << -1, -0.5, -2;
  CHECK(oracle::prox_oracle(neg, 0.5).norm() <= 1e-12);
  CHECK_THROWS_AS(oracle::prox_oracle(y, 0.0), Error);
}

TEST_CASE("least-squares residual oracle basics") {
  const Eigen::MatrixXd x = testing::random_normal(10, 4, 1);
  CHECK(oracle::lsq_residual_oracle(x, {}) == doctest::Approx(x.norm()));
  CHECK(oracle::lsq_residual_oracle(x, {0, 1, 2, 3}) <= 1e-12);
  CHECK_THROWS_AS(oracle::lsq_residual_oracle(x, {4}), Error);
}

TEST_CASE("least-squares residual shrinks along every nested pair of subsets") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Index d = 5 + static_cast<Index>(seed);  // up to 8
    const Eigen::MatrixXd x = testing::random_normal(d + 2, d, 10 + seed);
    const unsigned full = 1u << d;
    std::vector<double> residual(full);
    for (unsigned mask = 0; mask < full; ++mask) {
      std::vector<Index> cols;
      for (Index j = 0; j < d; ++j)
        if (mask & (1u << j)) cols.push_back(j);
      residual[mask] = oracle::lsq_residual_oracle(x, cols);
    }
    // it suffices to compare each subset with its one-element extensions
    for (unsigned mask = 0; mask < full; ++mask)
      for (Index j = 0; j < d; ++j)
        if (!(mask & (1u << j))) CHECK(residual[mask] >= residual[mask | (1u << j)] - 1e-10);
  }
}

TEST_CASE("assignment oracle") {
  Eigen::MatrixXd one(1, 1);
  one << 7;
  CHECK(oracle::assignment_oracle(one) == 7.0);
  const Eigen::MatrixXd dominant = Eigen::MatrixXd::Identity(5, 5) * 10 + Eigen::MatrixXd::Ones(5, 5);
  CHECK(oracle::assignment_oracle(dominant) == 55.0);
  CHECK_THROWS_AS(oracle::assignment_oracle(Eigen::MatrixXd::Zero(9, 9)), Error);
}

TEST_CASE("verification suites come back clean") {
  const auto prox = oracle::verify_prox(50, 1, 1e-6, 100000);
  CHECK(prox.case_count == 50);
  CHECK(prox.passed());
  const auto assignment = oracle::verify_assignment(200, 2);
  CHECK(assignment.passed());
  const auto greedy = oracle::verify_greedy_residual(30, 3);
  CHECK(greedy.passed());
  CHECK(greedy.max_abs_error <= 1e-10);
}

}  // TEST_SUITE
