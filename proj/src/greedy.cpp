#include "glossfs/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glossfs/error.hpp"
#include "glossfs/linalg.hpp"

namespace glossfs {

double correlation(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::MatrixXd>& r) {
  if (x.size() != r.rows())
    fail(ErrorKind::InvalidArgument, "correlation: vector and residual row counts differ");
  return (r.transpose() * x).cwiseAbs().sum();
}

Eigen::MatrixXd greedy_residual(const Eigen::MatrixXd& x, const std::vector<Index>& selected) {
  if (selected.empty()) return x;
  Eigen::MatrixXd xi(x.rows(), static_cast<Index>(selected.size()));
  for (std::size_t j = 0; j < selected.size(); ++j)
    xi.col(static_cast<Index>(j)) = x.col(selected[j]);
  const double cutoff = static_cast<double>(std::max(x.rows(), x.cols()));
  const Eigen::MatrixXd basis = range_basis(xi, cutoff);
  return x - basis * (basis.transpose() * x);
}

Eigen::VectorXd greedy_scores(const Eigen::MatrixXd& x, const Eigen::MatrixXd& residual,
                              const Eigen::VectorXd& locality,
                              const std::vector<bool>& candidate) {
  const Index d = x.cols();
  // |x_j^T r_s| for all pairs at once
  const Eigen::MatrixXd inner = x.transpose() * residual;
  Eigen::VectorXd cor = inner.cwiseAbs().rowwise().sum();

  double cor_total = 0.0;
  double loc_total = 0.0;
  for (Index j = 0; j < d; ++j) {
    if (!candidate[static_cast<std::size_t>(j)]) continue;
    cor_total += cor(j);
    loc_total += locality(j);
  }

  Eigen::VectorXd scores =
      Eigen::VectorXd::Constant(d, std::numeric_limits<double>::quiet_NaN());
  for (Index j = 0; j < d; ++j) {
    if (!candidate[static_cast<std::size_t>(j)]) continue;
    const double a = cor_total != 0.0 ? cor(j) / cor_total : 0.0;
    const double b = loc_total != 0.0 ? locality(j) / loc_total : 0.0;
    scores(j) = a + b;
  }
  return scores;
}

GreedyResult glpsl_select(const DataMatrix& x, const SimilarityGraph& graph, Index kappa) {
  const auto& v = x.values();
  const Index d = v.cols();
  if (kappa < 1) fail(ErrorKind::InvalidArgument, "kappa must be at least 1");
  if (kappa > d)
    fail(ErrorKind::InvalidArgument, "kappa=" + std::to_string(kappa) +
                                         " exceeds feature count d=" + std::to_string(d));
  if (graph.s.rows() != v.rows() || graph.s.cols() != v.rows())
    fail(ErrorKind::InvalidArgument, "similarity graph size does not match sample count");

  // x_j^T S x_j for every column
  const Eigen::VectorXd locality = (v.array() * (graph.s * v).array()).colwise().sum();

  GreedyResult out;
  std::vector<bool> candidate(static_cast<std::size_t>(d), true);
  Eigen::MatrixXd residual = v;
  for (Index round = 0; round < kappa; ++round) {
    out.last_scores = greedy_scores(v, residual, locality, candidate);
    Index best = -1;
    for (Index j = 0; j < d; ++j) {
      if (!candidate[static_cast<std::size_t>(j)]) continue;
      if (best < 0 || out.last_scores(j) > out.last_scores(best)) best = j;
    }
    candidate[static_cast<std::size_t>(best)] = false;
    out.selected.push_back(best);
    residual = greedy_residual(v, out.selected);
    out.residual_history.push_back(residual.norm());
  }
  return out;
}

}  // namespace glossfs
