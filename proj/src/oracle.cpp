#include "glossfs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "glossfs/error.hpp"
#include "glossfs/eval.hpp"
#include "glossfs/greedy.hpp"
#include "glossfs/prox.hpp"

namespace glossfs::oracle {

double prox_objective(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double lambda) {
  return 0.5 * (x - y).squaredNorm() + lambda * x.norm();
}

Eigen::VectorXd prox_oracle(const Eigen::VectorXd& y, double lambda, int iters) {
  if (!(lambda > 0.0)) fail(ErrorKind::InvalidArgument, "oracle lambda must be positive");
  // projected gradient with backtracking; 0 is a valid subgradient of ||.|| at 0
  Eigen::VectorXd x = y.cwiseMax(0.0);
  double f = prox_objective(x, y, lambda);
  double step = 1.0;
  for (int k = 0; k < iters; ++k) {
    const double norm = x.norm();
    Eigen::VectorXd g = x - y;
    if (norm > 0.0) g += (lambda / norm) * x;
    Eigen::VectorXd next;
    double f_next = f;
    step = std::min(1.0, 2.0 * step);
    for (;;) {
      next = (x - step * g).cwiseMax(0.0);
      f_next = prox_objective(next, y, lambda);
      if (f_next <= f - 0.5 / step * (next - x).squaredNorm() || step < 1e-20) break;
      step *= 0.5;
    }
    const double moved = (next - x).norm();
    if (f_next <= f) {
      x = std::move(next);
      f = f_next;
    }
    if (moved <= 1e-15 * std::max(1.0, x.norm())) break;
  }
  return x;
}

double lsq_residual_oracle(const Eigen::MatrixXd& x, const std::vector<Index>& columns) {
  if (columns.empty()) return x.norm();
  Eigen::MatrixXd xi(x.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] < 0 || columns[j] >= x.cols())
      fail(ErrorKind::InvalidArgument, "oracle column index out of range");
    xi.col(static_cast<Index>(j)) = x.col(columns[j]);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xi);
  const Eigen::MatrixXd h = qr.solve(x);
  return (x - xi * h).norm();
}

double assignment_oracle(const Eigen::MatrixXd& weight) {
  const Index c = weight.rows();
  if (weight.cols() != c) fail(ErrorKind::InvalidArgument, "assignment oracle needs a square matrix");
  if (c > 8) fail(ErrorKind::InvalidArgument, "assignment oracle supports c <= 8");
  if (c == 0) return 0.0;
  std::vector<Index> perm(static_cast<std::size_t>(c));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Index i = 0; i < c; ++i) total += weight(i, perm[static_cast<std::size_t>(i)]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

namespace {

void record(OracleReport& report, double abs_err, double scale, const std::string& label) {
  ++report.case_count;
  const double rel = abs_err / std::max(1.0, scale);
  report.max_abs_error = std::max(report.max_abs_error, abs_err);
  report.max_rel_error = std::max(report.max_rel_error, rel);
  if (!(abs_err <= report.tolerance)) {
    std::ostringstream os;
    os << label << " error=" << abs_err;
    report.failures.push_back(os.str());
  }
}

}  // namespace

OracleReport verify_prox(std::size_t cases, std::uint64_t seed, double tol, int iters) {
  OracleReport report;
  report.name = "prox";
  report.tolerance = tol;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 0; c < cases; ++c) {
    Eigen::VectorXd y(100);
    const double scale = 3.0 * unit(rng) + 0.1;
    for (Index i = 0; i < y.size(); ++i) y(i) = scale * normal(rng);
    const double lambda = 10.0 * (1.0 - unit(rng));  // (0, 10]
    const Eigen::VectorXd fast = prox_row(y, lambda);
    const Eigen::VectorXd slow = prox_oracle(y, lambda, iters);
    const double gap = prox_objective(fast, y, lambda) - prox_objective(slow, y, lambda);
    double err = (fast - slow).cwiseAbs().maxCoeff();
    if (gap > 1e-8) err = std::max(err, std::numeric_limits<double>::infinity());
    record(report, err, fast.cwiseAbs().maxCoeff(), "case " + std::to_string(c));
  }
  return report;
}

OracleReport verify_assignment(std::size_t cases, std::uint64_t seed) {
  OracleReport report;
  report.name = "assignment";
  report.tolerance = 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(1, 7);
  std::uniform_int_distribution<int> count(0, 30);
  for (std::size_t c = 0; c < cases; ++c) {
    const int k = size(rng);
    Eigen::MatrixXd w(k, k);
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j) w(i, j) = count(rng);
    const auto map = max_weight_assignment(w);
    double value = 0.0;
    for (Index i = 0; i < k; ++i) value += w(i, map[static_cast<std::size_t>(i)]);
    record(report, std::abs(value - assignment_oracle(w)), value,
           "case " + std::to_string(c) + " (c=" + std::to_string(k) + ")");
  }
  return report;
}

OracleReport verify_greedy_residual(std::size_t cases, std::uint64_t seed) {
  OracleReport report;
  report.name = "greedy_residual";
  report.tolerance = 1e-10;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> dims(2, 8);
  for (std::size_t c = 0; c < cases; ++c) {
    const int d = dims(rng);
    const int n = d + 2;
    Eigen::MatrixXd x(n, d);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < d; ++j) x(i, j) = normal(rng);
    const auto normalized = normalize_features(DataMatrix(x));
    const auto graph = lpp_similarity(normalized.matrix, 2, SigmaPolicy::median());
    const auto result = glpsl_select(normalized.matrix, graph, d);
    std::vector<Index> prefix;
    double previous = normalized.matrix.values().norm();
    for (std::size_t r = 0; r < result.selected.size(); ++r) {
      prefix.push_back(result.selected[r]);
      const double expect = lsq_residual_oracle(normalized.matrix.values(), prefix);
      const double got = result.residual_history[r];
      double err = std::abs(expect - got);
      if (got > previous + 1e-10) err = std::max(err, got - previous);
      previous = got;
      record(report, err, expect,
             "case " + std::to_string(c) + " round " + std::to_string(r + 1));
    }
  }
  return report;
}

}  // namespace glossfs::oracle
