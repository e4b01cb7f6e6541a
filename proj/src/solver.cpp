#include "glossfs/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "glossfs/error.hpp"
#include "glossfs/linalg.hpp"
#include "glossfs/prox.hpp"

namespace glossfs {

void SolverConfig::validate(Index d) const {
  auto bad = [](const std::string& what) { fail(ErrorKind::InvalidArgument, what); };
  if (K < 1) bad("K must be at least 1");
  if (kappa < 1) bad("kappa must be at least 1");
  if (kappa > d)
    bad("kappa=" + std::to_string(kappa) + " exceeds feature count d=" + std::to_string(d));
  if (!(mu >= 0.0) || !std::isfinite(mu)) bad("mu must be finite and >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) bad("beta must be finite and >= 0");
  if (!(delta_omega > 0.0 && delta_omega < 1.0)) bad("delta_omega must lie in (0, 1)");
  if (max_iter < 0) bad("max_iter must be >= 0");
  if (!(tol >= 0.0)) bad("tol must be >= 0");
  if (m < 1) bad("m must be at least 1");
}

SolverProblem::SolverProblem(const Eigen::MatrixXd& x_, const Eigen::MatrixXd& l_)
    : x(x_), l(l_) {
  if (l.rows() != x.rows() || l.cols() != x.rows())
    fail(ErrorKind::InvalidArgument, "Laplacian size does not match sample count");
  spec_xtx = gram_spectral_norm(x);
  spec_xtlx = spectral_norm(
      [this](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return x.transpose() * (l * (x * v));
      },
      x.cols());
}

double objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l, const Eigen::MatrixXd& w,
                 const Eigen::MatrixXd& h, double mu, double beta) {
  if ((w.array() < 0.0).any())
    fail(ErrorKind::InvalidArgument, "objective: W has a negative entry");
  const Eigen::MatrixXd xw = x * w;
  const double misfit = (x - xw * h).squaredNorm();
  const double local = mu != 0.0 ? (xw.array() * (l * xw).array()).sum() : 0.0;
  const double sparsity = beta != 0.0 ? w.rowwise().norm().sum() : 0.0;
  return 0.5 * misfit + 0.5 * mu * local + beta * sparsity;
}

Eigen::MatrixXd grad_w(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l,
                       const Eigen::MatrixXd& w, const Eigen::MatrixXd& h, double mu) {
  const Eigen::MatrixXd xw = x * w;
  const Eigen::MatrixXd hht = h * h.transpose();
  Eigen::MatrixXd inner = xw * hht - x * h.transpose();
  if (mu != 0.0) inner.noalias() += mu * (l * xw);
  return x.transpose() * inner;
}

double lipschitz_w(double spec_xtx, double spec_xtlx, const Eigen::MatrixXd& h, double mu) {
  const Eigen::MatrixXd hht = h * h.transpose();
  return spectral_norm(hht) * spec_xtx + mu * spec_xtlx;
}

Extrapolation extrapolation_weight(double t_prev, double lipschitz_prev, double lipschitz,
                                   double delta_omega) {
  Extrapolation out;
  out.t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev));
  const double momentum = (t_prev - 1.0) / out.t_next;
  const double cap = delta_omega * std::sqrt(lipschitz_prev / lipschitz);
  out.omega = std::min(momentum, cap);
  return out;
}

Eigen::MatrixXd update_h(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd xw = x * w;
  return pinv_solve(xw, x, static_cast<double>(w.cols()));
}

FeatureRanking rank_features(const Eigen::MatrixXd& w, Index kappa) {
  const Index d = w.rows();
  if (kappa < 0 || kappa > d)
    fail(ErrorKind::InvalidArgument, "kappa out of range for ranking");
  Eigen::MatrixXd normalized = w;
  for (Index k = 0; k < normalized.cols(); ++k) {
    const double norm = normalized.col(k).norm();
    if (norm > 0.0) normalized.col(k) /= norm;
  }
  FeatureRanking out;
  out.scores = normalized.rowwise().norm();
  out.ordering.resize(static_cast<std::size_t>(d));
  std::iota(out.ordering.begin(), out.ordering.end(), Index{0});
  std::stable_sort(out.ordering.begin(), out.ordering.end(),
                   [&](Index a, Index b) { return out.scores(a) > out.scores(b); });
  out.selected.assign(out.ordering.begin(), out.ordering.begin() + kappa);
  return out;
}

namespace {

// Prox step that also covers beta = 0 (plain projection onto W >= 0).
Eigen::MatrixXd prox_step(const Eigen::MatrixXd& y, double lambda) {
  if (lambda == 0.0) return y.cwiseMax(0.0);
  if (!std::isfinite(lambda)) return Eigen::MatrixXd::Zero(y.rows(), y.cols());
  return prox_ngl(y, lambda);
}

struct Candidate {
  Eigen::MatrixXd w;
  Eigen::MatrixXd h;
  double f = 0.0;
};

}  // namespace

GlossResult gloss_run(const DataMatrix& data, const LaplacianMatrix& lap,
                      const SolverConfig& config) {
  const Eigen::MatrixXd& x = data.values();
  const Index d = x.cols();
  config.validate(d);
  const SolverProblem problem(x, lap.l);
  const Eigen::MatrixXd& l = lap.l;
  const double mu = config.mu;
  const double beta = config.beta;

  SolverState st;
  {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    st.w.resize(d, config.K);
    for (Index k = 0; k < config.K; ++k)
      for (Index i = 0; i < d; ++i) st.w(i, k) = uniform(rng);
  }
  st.w_prev = st.w;
  st.h = update_h(x, st.w);
  double f = objective(x, l, st.w, st.h, mu, beta);
  st.objective_history.push_back(f);
  st.lipschitz_prev = lipschitz_w(problem.spec_xtx, problem.spec_xtlx, st.h, mu);

  auto step_from = [&](const Eigen::MatrixXd& base, double lw) {
    Candidate c;
    c.w = prox_step(base - grad_w(x, l, base, st.h, mu) / lw, beta / lw);
    c.h = update_h(x, c.w);
    c.f = objective(x, l, c.w, c.h, mu, beta);
    return c;
  };

  while (st.iter < config.max_iter) {
    const auto started = std::chrono::steady_clock::now();
    double lw = lipschitz_w(problem.spec_xtx, problem.spec_xtlx, st.h, mu);
    // W = 0 with mu = 0 leaves a zero gradient; any positive step works
    if (lw <= 0.0) lw = std::numeric_limits<double>::min();

    Extrapolation ex = extrapolation_weight(st.t, st.lipschitz_prev, lw, config.delta_omega);
    if (!config.extrapolate) ex.omega = 0.0;

    StepRecord rec;
    rec.lipschitz = lw;
    rec.omega = ex.omega;
    Candidate next = ex.omega > 0.0 ? step_from(st.w + ex.omega * (st.w - st.w_prev), lw)
                                    : step_from(st.w, lw);
    if (ex.omega > 0.0 && next.f >= f) {
      next = step_from(st.w, lw);
      rec.restarted = true;
      rec.omega = 0.0;
      ++st.restarts;
    }
    if (!std::isfinite(next.f))
      fail(ErrorKind::Numerical,
           "objective became non-finite at iteration " + std::to_string(st.iter + 1));

    const double step_sq = (next.w - st.w).squaredNorm();
    rec.step_norm = std::sqrt(step_sq);
    if (rec.omega == 0.0) {
      rec.w_decrease = f - objective(x, l, next.w, st.h, mu, beta);
      rec.decrease_bound = 0.5 * lw * step_sq;
    }

    st.w_prev = std::move(st.w);
    st.w = std::move(next.w);
    st.h = std::move(next.h);
    st.lipschitz_prev = lw;
    st.lipschitz = lw;
    st.t = ex.t_next;
    const double f_old = f;
    f = next.f;
    st.objective_history.push_back(f);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    st.steps.push_back(rec);
    ++st.iter;

    if (config.tol > 0.0 &&
        std::abs(f_old - f) <= config.tol * std::max(std::abs(f_old),
                                                     std::numeric_limits<double>::min()))
      break;
  }

  GlossResult out{std::move(st), {}};
  out.ranking = rank_features(out.state.w, config.kappa);
  return out;
}

}  // namespace glossfs
