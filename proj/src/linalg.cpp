#include "glossfs/linalg.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "glossfs/error.hpp"

namespace glossfs {

double spectral_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                     Eigen::Index dim, const PowerIterationOptions& options) {
  if (dim <= 0) return 0.0;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(0.5, 1.5);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = uniform(rng);
  v.normalize();

  double lambda = 0.0;
  for (int it = 0; it < options.max_iter; ++it) {
    Eigen::VectorXd av = apply(v);
    const double next = v.dot(av);
    const double norm = av.norm();
    if (norm == 0.0) return 0.0;
    v = av / norm;
    if (it > 0 && std::abs(next - lambda) <= options.rel_tol * std::abs(next)) {
      // one more Rayleigh quotient on the refreshed vector
      return std::max(next, v.dot(apply(v)));
    }
    lambda = next;
  }
  fail(ErrorKind::Numerical, "power iteration did not converge in " +
                                 std::to_string(options.max_iter) + " iterations");
}

double spectral_norm(const Eigen::MatrixXd& a, const PowerIterationOptions& options) {
  return spectral_norm([&a](const Eigen::VectorXd& v) -> Eigen::VectorXd { return a * v; },
                       a.rows(), options);
}

double gram_spectral_norm(const Eigen::MatrixXd& a, const PowerIterationOptions& options) {
  if (a.rows() < a.cols()) {
    return spectral_norm(
        [&a](const Eigen::VectorXd& v) -> Eigen::VectorXd {
          return a * (a.transpose() * v);
        },
        a.rows(), options);
  }
  return spectral_norm(
      [&a](const Eigen::VectorXd& v) -> Eigen::VectorXd { return a.transpose() * (a * v); },
      a.cols(), options);
}

namespace {

struct ThinSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
  Eigen::Index rank = 0;
};

ThinSvd thin_svd(const Eigen::MatrixXd& a, double cutoff_factor) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV(), 0};
  if (out.s.size() == 0) return out;
  const double threshold =
      cutoff_factor * std::numeric_limits<double>::epsilon() * out.s(0);
  while (out.rank < out.s.size() && out.s(out.rank) > threshold && out.s(out.rank) > 0.0)
    ++out.rank;
  return out;
}

}  // namespace

Eigen::MatrixXd pinv_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                           double cutoff_factor) {
  const ThinSvd svd = thin_svd(a, cutoff_factor);
  const Eigen::Index r = svd.rank;
  if (r == 0) return Eigen::MatrixXd::Zero(a.cols(), c.cols());
  Eigen::MatrixXd utc = svd.u.leftCols(r).transpose() * c;
  utc = svd.s.head(r).cwiseInverse().asDiagonal() * utc;
  return svd.v.leftCols(r) * utc;
}

Eigen::MatrixXd range_basis(const Eigen::MatrixXd& a, double cutoff_factor) {
  const ThinSvd svd = thin_svd(a, cutoff_factor);
  return svd.u.leftCols(svd.rank);
}

}  // namespace glossfs
