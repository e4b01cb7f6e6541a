#pragma once

#include <Eigen/Dense>
#include <vector>

#include "glossfs/dataset.hpp"
#include "glossfs/graph.hpp"

namespace glossfs {

// Sum over the columns r of R of |x^T r|.
double correlation(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::MatrixXd>& r);

struct GreedyResult {
  std::vector<Index> selected;           // in pick order
  std::vector<double> residual_history;  // ||R||_F after each pick
  Eigen::VectorXd last_scores;           // scores of the final round, NaN outside Omega
};

// Residual X - P X where P projects onto range(X_I); X itself when I is empty.
Eigen::MatrixXd greedy_residual(const Eigen::MatrixXd& x, const std::vector<Index>& selected);

// Scores of one greedy round: normalized correlation with the residual plus
// normalized locality x_j^T S x_j, both normalized over the candidates.
// Entries outside `candidates` are NaN.
Eigen::VectorXd greedy_scores(const Eigen::MatrixXd& x, const Eigen::MatrixXd& residual,
                              const Eigen::VectorXd& locality,
                              const std::vector<bool>& candidate);

// Greedy locally preserved subspace selection of kappa columns.
GreedyResult glpsl_select(const DataMatrix& x, const SimilarityGraph& graph, Index kappa);

}  // namespace glossfs
