#include <doctest.h>

#include <random>

#include "glossfs/error.hpp"
#include "glossfs/oracle.hpp"
#include "glossfs/prox.hpp"
#include "support.hpp"

using namespace glossfs;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Index nonzero_rows(const Eigen::MatrixXd& m) {
  Index count = 0;
  for (Index i = 0; i < m.rows(); ++i)
    if (m.row(i).norm() > 0.0) ++count;
  return count;
}

}  // namespace

TEST_SUITE("prox") {

TEST_CASE("closed form examples") {
  CHECK(prox_row(vec({3, 4}), 1.0).isApprox(vec({2.4, 3.2}), 1e-15));
  CHECK(prox_row(vec({-1, -2}), 0.3).isZero(0.0));
  CHECK(prox_row(vec({0.3, 0.4}), 1.0).isZero(0.0));
  CHECK(prox_row(vec({3, -4}), 1.0).isApprox(vec({2, 0}), 1e-15));
  // y_i = 0 exactly is outside the positive index set
  CHECK(prox_row(vec({0, 5}), 1.0).isApprox(vec({0, 4}), 1e-15));
}

TEST_CASE("lambda must be positive") {
  CHECK_THROWS_AS(prox_row(vec({1, 2}), 0.0), Error);
  CHECK_THROWS_AS(prox_ngl(Eigen::MatrixXd::Ones(2, 2), -1.0), Error);
}

TEST_CASE("matches the subgradient oracle on random inputs") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < 1000; ++c) {
    Eigen::VectorXd y(8);
    for (Index i = 0; i < 8; ++i) y(i) = 2.0 * normal(rng);
    const double lambda = 5.0 * (1.0 - unit(rng));
    const auto fast = prox_row(y, lambda);
    const auto slow = oracle::prox_oracle(y, lambda, 20000);
    CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(oracle::prox_objective(fast, y, lambda) <=
          oracle::prox_objective(slow, y, lambda) + 1e-8);
  }
}

TEST_CASE("no nonnegative perturbation improves the objective") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < 20; ++c) {
    Eigen::VectorXd y(6);
    for (Index i = 0; i < 6; ++i) y(i) = normal(rng);
    const double lambda = 2.0 * unit(rng) + 1e-3;
    const auto x = prox_row(y, lambda);
    const double fx = oracle::prox_objective(x, y, lambda);
    for (int k = 0; k < 10000; ++k) {
      Eigen::VectorXd z(6);
      const double scale = std::pow(10.0, -4.0 * unit(rng));
      for (Index i = 0; i < 6; ++i) z(i) = x(i) + scale * normal(rng);
      z = z.cwiseMax(0.0);
      CHECK(fx <= oracle::prox_objective(z, y, lambda) + 1e-14);
    }
  }
}

TEST_CASE("nonexpansive on the nonnegative orthant") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Eigen::VectorXd a = testing::random_uniform(5, 1, 2 * seed) * 3.0;
    const Eigen::VectorXd b = testing::random_uniform(5, 1, 2 * seed + 1) * 3.0;
    const double lambda = 0.1 + 0.01 * static_cast<double>(seed);
    CHECK((prox_row(a, lambda) - prox_row(b, lambda)).norm() <= (a - b).norm() + 1e-15);
  }
}

TEST_CASE("prox_ngl is row-wise prox_row") {
  const Eigen::MatrixXd y = testing::random_normal(12, 4, 8);
  const auto w = prox_ngl(y, 0.7);
  CHECK((w.array() >= 0.0).all());
  for (Index i = 0; i < 12; ++i) CHECK(w.row(i).transpose().isApprox(prox_row(y.row(i).transpose(), 0.7)));
}

TEST_CASE("all-negative rows vanish; tiny lambda leaves nonnegative input almost unchanged") {
  const Eigen::MatrixXd neg = -testing::random_uniform(5, 3, 1) - Eigen::MatrixXd::Constant(5, 3, 0.1);
  CHECK(prox_ngl(neg, 0.5).isZero(0.0));
  const Eigen::MatrixXd pos = testing::random_uniform(5, 3, 2);
  CHECK((prox_ngl(pos, 1e-12) - pos).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("row sparsity is monotone in lambda") {
  const Eigen::MatrixXd y = testing::random_normal(40, 5, 77);
  Index previous = y.rows() + 1;
  for (double lambda : {0.01, 0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
    const Index nz = nonzero_rows(prox_ngl(y, lambda));
    CHECK(nz <= previous);
    previous = nz;
  }
}

}  // TEST_SUITE
