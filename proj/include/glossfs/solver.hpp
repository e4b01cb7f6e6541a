#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "glossfs/dataset.hpp"
#include "glossfs/graph.hpp"

namespace glossfs {

struct SolverConfig {
  Index K = 100;           // subspace dimension
  Index kappa = 50;        // features to select
  double mu = 1.0;         // local structure weight
  double beta = 1.0;       // row sparsity weight
  double delta_omega = 0.99;
  int max_iter = 30;
  double tol = 0.0;        // relative objective change; 0 disables early stop
  std::uint64_t seed = 0;
  GraphKind graph_kind = GraphKind::Lpp;
  Index m = 5;
  // Disables extrapolation (omega = 0 on every step).
  bool extrapolate = true;

  // Throws InvalidArgument on a violated invariant; d is the feature count.
  void validate(Index d) const;
};

// Per-step diagnostics, one entry per accepted iteration.
struct StepRecord {
  double omega = 0.0;
  double lipschitz = 0.0;
  bool restarted = false;
  // F(W^k, H^k) - F(W^{k+1}, H^k), the decrease of the W half-step alone
  double w_decrease = 0.0;
  // (L_w / 2) ||W^{k+1} - W^k||_F^2
  double decrease_bound = 0.0;
  double step_norm = 0.0;  // ||W^{k+1} - W^k||_F
  double seconds = 0.0;    // wall time of the iteration
};

struct SolverState {
  Eigen::MatrixXd w;       // d x K, entrywise >= 0
  Eigen::MatrixXd w_prev;
  Eigen::MatrixXd h;       // K x d
  double t = 1.0;
  double lipschitz = 0.0;
  double lipschitz_prev = 0.0;
  std::vector<double> objective_history;  // F at W^0 first, then each accepted step
  std::vector<StepRecord> steps;
  int iter = 0;
  int restarts = 0;
};

struct FeatureRanking {
  Eigen::VectorXd scores;        // row norms of the column-normalized W
  std::vector<Index> ordering;   // by score descending, ties to the smaller index
  std::vector<Index> selected;   // first kappa of ordering
};

// Precomputed per-run quantities shared by every iteration.
struct SolverProblem {
  const Eigen::MatrixXd& x;
  const Eigen::MatrixXd& l;
  double spec_xtx = 0.0;   // ||X^T X||_2
  double spec_xtlx = 0.0;  // ||X^T L X||_2

  SolverProblem(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l);
};

// 1/2 ||X - XWH||_F^2 + mu/2 Tr(W^T X^T L X W) + beta sum_i ||W_i.||_2.
// Throws InvalidArgument when W has a negative entry.
double objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l, const Eigen::MatrixXd& w,
                 const Eigen::MatrixXd& h, double mu, double beta);

// X^T (XWH - X) H^T + mu X^T L X W, evaluated as X^T (XW (HH^T) - X H^T + mu L (XW)).
Eigen::MatrixXd grad_w(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l,
                       const Eigen::MatrixXd& w, const Eigen::MatrixXd& h, double mu);

// ||HH^T||_2 ||X^T X||_2 + mu ||X^T L X||_2.
double lipschitz_w(double spec_xtx, double spec_xtlx, const Eigen::MatrixXd& h, double mu);

struct Extrapolation {
  double omega = 0.0;
  double t_next = 1.0;
};

Extrapolation extrapolation_weight(double t_prev, double lipschitz_prev, double lipschitz,
                                   double delta_omega);

// argmin_H 1/2 ||X - XWH||_F^2, the minimum-norm solution (XW)^+ X.
Eigen::MatrixXd update_h(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w);

// Column-normalizes W (zero columns skipped), scores rows by l2 norm and
// keeps the kappa best.
FeatureRanking rank_features(const Eigen::MatrixXd& w, Index kappa);

struct GlossResult {
  SolverState state;
  FeatureRanking ranking;
};

// Accelerated block coordinate descent on (W, H) with restart.
GlossResult gloss_run(const DataMatrix& x, const LaplacianMatrix& l, const SolverConfig& config);

}  // namespace glossfs
