#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "glossfs/dataset.hpp"

namespace glossfs {

enum class Seeding { PlusPlus, Uniform };

struct KMeansOptions {
  int max_iter = 300;
  double center_tol = 1e-6;  // stop once no center moves farther than this
  Seeding seeding = Seeding::PlusPlus;
};

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centers;  // c x dims
  double inertia = 0.0;
  int iterations = 0;
};

// Lloyd iterations on the rows of y. Deterministic given seed.
KMeansResult kmeans(const Eigen::MatrixXd& y, int clusters, std::uint64_t seed,
                    const KMeansOptions& options = {});

// Maximum-weight assignment on a rows x cols weight matrix (Kuhn-Munkres).
// Returns, per row, the matched column or -1 when rows > cols.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight);

// Cluster -> class map maximizing the number of matched samples. Clusters
// left without a class map to -1.
std::vector<int> best_mapping(const std::vector<int>& pred, const std::vector<int>& truth);

double acc(const std::vector<int>& pred, const std::vector<int>& truth);

// I(P,Q) / sqrt(H(P) H(Q)) with natural-log entropies.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

struct RunMetrics {
  std::vector<int> labels;
  double acc = 0.0;
  double nmi = 0.0;
};

struct ClusteringEval {
  int runs = 0;
  double acc_mean = 0.0;
  double acc_std = 0.0;
  double nmi_mean = 0.0;
  double nmi_std = 0.0;
  std::vector<RunMetrics> per_run;
};

struct EvalOptions {
  int runs = 20;
  std::uint64_t seed = 0;
  int threads = 1;
  KMeansOptions kmeans;
};

// K-means on the selected columns `runs` times (seeds seed .. seed+runs-1),
// with the class count of `truth` as the cluster count. Population std.
ClusteringEval evaluate_selection(const DataMatrix& x, const std::vector<Index>& selected,
                                  const LabelVector& truth, const EvalOptions& options = {});

}  // namespace glossfs
