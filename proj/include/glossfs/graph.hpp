#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "glossfs/dataset.hpp"

namespace glossfs {

enum class GraphKind { Lpp, Lle };

std::string to_string(GraphKind kind);
GraphKind parse_graph_kind(const std::string& name);

// Heat-kernel width: the median kNN edge length unless a fixed value is set.
struct SigmaPolicy {
  std::optional<double> fixed;

  static SigmaPolicy median() { return {}; }
  static SigmaPolicy value(double sigma) { return {sigma}; }
};

struct SimilarityGraph {
  Eigen::MatrixXd s;
  Index m = 0;
  GraphKind kind = GraphKind::Lpp;
  double sigma = 0.0;  // resolved width, LPP only
};

struct LaplacianMatrix {
  Eigen::MatrixXd l;
  GraphKind kind = GraphKind::Lpp;
};

using NeighborSets = std::vector<std::vector<Index>>;

// m nearest rows of each row by Euclidean distance, nearest first. Ties go
// to the smaller row index. Throws InvalidArgument when m >= n.
NeighborSets knn_sets(const DataMatrix& x, Index m);

SimilarityGraph lpp_similarity(const DataMatrix& x, Index m, const SigmaPolicy& sigma);

// Locally linear reconstruction weights; each row sums to one.
SimilarityGraph lle_weights(const DataMatrix& x, Index m, double gram_reg = 1e-3);

LaplacianMatrix laplacian(const SimilarityGraph& graph);

}  // namespace glossfs
