#include "glossfs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glossfs/error.hpp"

namespace glossfs {

std::string to_string(GraphKind kind) { return kind == GraphKind::Lpp ? "lpp" : "lle"; }

GraphKind parse_graph_kind(const std::string& name) {
  if (name == "lpp" || name == "LPP") return GraphKind::Lpp;
  if (name == "lle" || name == "LLE") return GraphKind::Lle;
  fail(ErrorKind::InvalidArgument, "unknown graph kind '" + name + "' (expected lpp or lle)");
}

namespace {

void check_neighbor_count(const DataMatrix& x, Index m) {
  if (m < 1) fail(ErrorKind::InvalidArgument, "neighbor count m must be at least 1");
  if (m >= x.rows())
    fail(ErrorKind::InvalidArgument, "neighbor count m=" + std::to_string(m) +
                                         " must be smaller than n=" +
                                         std::to_string(x.rows()));
}

// Exact differences (not the Gram expansion) so duplicated rows give
// bit-identical distances and the index tie rule holds.
Eigen::VectorXd squared_distances_from(const Eigen::MatrixXd& v, Index i) {
  return (v.rowwise() - v.row(i)).rowwise().squaredNorm();
}

}  // namespace

NeighborSets knn_sets(const DataMatrix& x, Index m) {
  check_neighbor_count(x, m);
  const auto& v = x.values();
  const Index n = v.rows();
  NeighborSets out(static_cast<std::size_t>(n));
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    const Eigen::VectorXd dist = squared_distances_from(v, i);
    std::size_t k = 0;
    for (Index j = 0; j < n; ++j)
      if (j != i) order[k++] = j;
    auto closer = [&dist](Index a, Index b) {
      return dist(a) < dist(b) || (dist(a) == dist(b) && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + m, order.end(), closer);
    out[static_cast<std::size_t>(i)].assign(order.begin(), order.begin() + m);
  }
  return out;
}

SimilarityGraph lpp_similarity(const DataMatrix& x, Index m, const SigmaPolicy& policy) {
  const auto neighbors = knn_sets(x, m);
  const auto& v = x.values();
  const Index n = v.rows();

  double sigma = 0.0;
  if (policy.fixed) {
    sigma = *policy.fixed;
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      fail(ErrorKind::InvalidArgument, "heat-kernel sigma must be positive and finite");
  } else {
    std::vector<double> lengths;
    lengths.reserve(static_cast<std::size_t>(n * m));
    for (Index i = 0; i < n; ++i)
      for (Index j : neighbors[static_cast<std::size_t>(i)])
        lengths.push_back((v.row(i) - v.row(j)).norm());
    const auto mid = lengths.size() / 2;
    std::nth_element(lengths.begin(), lengths.begin() + static_cast<long>(mid), lengths.end());
    sigma = lengths[mid];
    if (lengths.size() % 2 == 0) {
      const double lower =
          *std::max_element(lengths.begin(), lengths.begin() + static_cast<long>(mid));
      sigma = 0.5 * (sigma + lower);
    }
    if (sigma == 0.0)
      fail(ErrorKind::Numerical,
           "median neighbor distance is zero (coincident points); pass a fixed sigma");
  }

  SimilarityGraph g;
  g.s = Eigen::MatrixXd::Zero(n, n);
  g.m = m;
  g.kind = GraphKind::Lpp;
  g.sigma = sigma;
  const double denom = 2.0 * sigma * sigma;
  for (Index i = 0; i < n; ++i) {
    for (Index j : neighbors[static_cast<std::size_t>(i)]) {
      const double w = std::exp(-(v.row(i) - v.row(j)).squaredNorm() / denom);
      g.s(i, j) = w;
      g.s(j, i) = w;
    }
  }
  return g;
}

SimilarityGraph lle_weights(const DataMatrix& x, Index m, double gram_reg) {
  if (!(gram_reg >= 0.0)) fail(ErrorKind::InvalidArgument, "gram_reg must be >= 0");
  const auto neighbors = knn_sets(x, m);
  const auto& v = x.values();
  const Index n = v.rows();

  SimilarityGraph g;
  g.s = Eigen::MatrixXd::Zero(n, n);
  g.m = m;
  g.kind = GraphKind::Lle;
  for (Index i = 0; i < n; ++i) {
    const auto& nb = neighbors[static_cast<std::size_t>(i)];
    Eigen::MatrixXd z(m, v.cols());
    for (Index a = 0; a < m; ++a) z.row(a) = v.row(nb[static_cast<std::size_t>(a)]) - v.row(i);
    Eigen::MatrixXd gram = z * z.transpose();
    const double trace = gram.trace();
    gram.diagonal().array() += trace > 0.0 ? gram_reg * trace : gram_reg;
    const Eigen::VectorXd w =
        gram.colPivHouseholderQr().solve(Eigen::VectorXd::Ones(m));
    const double total = w.sum();
    if (!std::isfinite(total) || std::abs(total) < 1e-12)
      fail(ErrorKind::Numerical,
           "LLE weights for row " + std::to_string(i) + " cannot be normalized");
    for (Index a = 0; a < m; ++a) g.s(i, nb[static_cast<std::size_t>(a)]) = w(a) / total;
  }
  return g;
}

LaplacianMatrix laplacian(const SimilarityGraph& graph) {
  const Index n = graph.s.rows();
  LaplacianMatrix out;
  out.kind = graph.kind;
  if (graph.kind == GraphKind::Lpp) {
    out.l = -graph.s;
    out.l.diagonal() += graph.s.rowwise().sum();
  } else {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - graph.s;
    out.l = a.transpose() * a;
    // exact symmetry; the product is only symmetric up to rounding
    out.l = 0.5 * (out.l + out.l.transpose()).eval();
  }
  return out;
}

}  // namespace glossfs
