#include "glossfs/prox.hpp"

#include <cmath>

#include "glossfs/error.hpp"

namespace glossfs {

namespace {

template <class In, class Out>
void shrink_positive_part(const In& y, double lambda, Out&& x) {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) > 0.0) sq += y(i) * y(i);
  const double norm = std::sqrt(sq);
  if (norm <= lambda) {
    x.setZero();
    return;
  }
  const double scale = (norm - lambda) / norm;
  for (Eigen::Index i = 0; i < y.size(); ++i) x(i) = y(i) > 0.0 ? scale * y(i) : 0.0;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    fail(ErrorKind::InvalidArgument, "prox lambda must be positive and finite");
}

}  // namespace

Eigen::VectorXd prox_row(const Eigen::Ref<const Eigen::VectorXd>& y, double lambda) {
  check_lambda(lambda);
  Eigen::VectorXd x(y.size());
  shrink_positive_part(y, lambda, x);
  return x;
}

Eigen::MatrixXd prox_ngl(const Eigen::Ref<const Eigen::MatrixXd>& y, double lambda) {
  check_lambda(lambda);
  Eigen::MatrixXd out(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.rows(); ++i) shrink_positive_part(y.row(i), lambda, out.row(i));
  return out;
}

}  // namespace glossfs
