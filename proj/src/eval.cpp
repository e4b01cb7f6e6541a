#include "glossfs/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "glossfs/error.hpp"

namespace glossfs {

namespace {

Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& y, int clusters, Seeding seeding,
                             std::mt19937_64& rng) {
  const Index n = y.rows();
  Eigen::MatrixXd centers(clusters, y.cols());
  std::vector<bool> used(static_cast<std::size_t>(n), false);

  if (seeding == Seeding::Uniform) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int c = 0; c < clusters; ++c) centers.row(c) = y.row(idx[static_cast<std::size_t>(c)]);
    return centers;
  }

  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Index first = pick(rng);
  centers.row(0) = y.row(first);
  used[static_cast<std::size_t>(first)] = true;
  Eigen::VectorXd d2 = (y.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < clusters; ++c) {
    const double total = d2.sum();
    Index chosen = -1;
    if (total > 0.0) {
      double r = unit(rng) * total;
      for (Index i = 0; i < n; ++i) {
        r -= d2(i);
        if (r < 0.0 && d2(i) > 0.0) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) {
        for (Index i = n - 1; i >= 0; --i)
          if (d2(i) > 0.0) {
            chosen = i;
            break;
          }
      }
    } else {
      // every point coincides with a center; fall back to an unused index
      std::vector<Index> free;
      for (Index i = 0; i < n; ++i)
        if (!used[static_cast<std::size_t>(i)]) free.push_back(i);
      std::uniform_int_distribution<std::size_t> any(0, free.size() - 1);
      chosen = free[any(rng)];
    }
    used[static_cast<std::size_t>(chosen)] = true;
    centers.row(c) = y.row(chosen);
    d2 = d2.cwiseMin((y.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

// Nearest center per row, ties to the smaller center index.
void assign(const Eigen::MatrixXd& y, const Eigen::MatrixXd& centers, std::vector<int>& labels,
            Eigen::VectorXd& dist) {
  const Index n = y.rows();
  for (Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (y.row(i) - centers.row(0)).squaredNorm();
    for (Index c = 1; c < centers.rows(); ++c) {
      const double dc = (y.row(i) - centers.row(c)).squaredNorm();
      if (dc < best_d) {
        best_d = dc;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    dist(i) = best_d;
  }
}

struct Contingency {
  Eigen::MatrixXd counts;  // pred x truth
  int pred_classes = 0;
  int truth_classes = 0;
};

std::vector<int> densify(const std::vector<int>& labels, int& classes) {
  std::map<int, int> ids;
  for (int v : labels) ids.emplace(v, 0);
  int next = 0;
  for (auto& [id, dense] : ids) dense = next++;
  classes = next;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int v : labels) out.push_back(ids.at(v));
  return out;
}

void check_lengths(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    fail(ErrorKind::InvalidArgument, "label vectors differ in length");
  if (pred.empty()) fail(ErrorKind::InvalidArgument, "label vectors are empty");
}

Contingency contingency(const std::vector<int>& pred, const std::vector<int>& truth,
                        std::vector<int>* pred_ids = nullptr) {
  Contingency out;
  const auto p = densify(pred, out.pred_classes);
  const auto q = densify(truth, out.truth_classes);
  out.counts = Eigen::MatrixXd::Zero(out.pred_classes, out.truth_classes);
  for (std::size_t i = 0; i < p.size(); ++i) out.counts(p[i], q[i]) += 1.0;
  if (pred_ids) *pred_ids = p;
  return out;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& y, int clusters, std::uint64_t seed,
                    const KMeansOptions& options) {
  const Index n = y.rows();
  if (clusters < 1) fail(ErrorKind::InvalidArgument, "cluster count must be at least 1");
  if (clusters > n)
    fail(ErrorKind::InvalidArgument, "cluster count " + std::to_string(clusters) +
                                         " exceeds sample count " + std::to_string(n));

  std::mt19937_64 rng(seed);
  KMeansResult out;
  out.centers = seed_centers(y, clusters, options.seeding, rng);
  out.labels.assign(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd dist(n);

  for (int it = 0; it < options.max_iter; ++it) {
    out.iterations = it + 1;
    assign(y, out.centers, out.labels, dist);

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(clusters, y.cols());
    std::vector<Index> size(static_cast<std::size_t>(clusters), 0);
    for (Index i = 0; i < n; ++i) {
      next.row(out.labels[static_cast<std::size_t>(i)]) += y.row(i);
      ++size[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < clusters; ++c) {
      if (size[static_cast<std::size_t>(c)] > 0) {
        next.row(c) /= static_cast<double>(size[static_cast<std::size_t>(c)]);
        continue;
      }
      // empty: move the center to the point farthest from its own center
      Index far = 0;
      for (Index i = 1; i < n; ++i)
        if (dist(i) > dist(far)) far = i;
      next.row(c) = y.row(far);
      --size[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(far)])];
      out.labels[static_cast<std::size_t>(far)] = c;
      size[static_cast<std::size_t>(c)] = 1;
      dist(far) = 0.0;
    }
    const double movement = (next - out.centers).rowwise().norm().maxCoeff();
    out.centers = std::move(next);
    if (movement < options.center_tol) break;
  }
  assign(y, out.centers, out.labels, dist);
  out.inertia = dist.sum();
  return out;
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight) {
  const Index rows = weight.rows();
  const Index cols = weight.cols();
  const Index size = std::max(rows, cols);
  if (size == 0) return {};
  // square min-cost problem on negated weights, padding with zeros
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(size, size);
  cost.topLeftCorner(rows, cols) = -weight;

  // potentials formulation, 1-based with a virtual column 0
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(size + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(size + 1), 0.0);
  std::vector<Index> match(static_cast<std::size_t>(size + 1), 0);  // column -> row
  std::vector<Index> way(static_cast<std::size_t>(size + 1), 0);
  for (Index i = 1; i <= size; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(size + 1), inf);
    std::vector<bool> used(static_cast<std::size_t>(size + 1), false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= size; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (used[ju]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[ju];
        if (cur < minv[ju]) {
          minv[ju] = cur;
          way[ju] = j0;
        }
        if (minv[ju] < delta) {
          delta = minv[ju];
          j1 = j;
        }
      }
      for (Index j = 0; j <= size; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (used[ju]) {
          u[static_cast<std::size_t>(match[ju])] += delta;
          v[ju] -= delta;
        } else {
          minv[ju] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> out(static_cast<std::size_t>(rows), -1);
  for (Index j = 1; j <= size; ++j) {
    const Index r = match[static_cast<std::size_t>(j)] - 1;
    if (r < rows && j - 1 < cols) out[static_cast<std::size_t>(r)] = static_cast<int>(j - 1);
  }
  return out;
}

std::vector<int> best_mapping(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_lengths(pred, truth);
  std::vector<int> pred_dense;
  const Contingency table = contingency(pred, truth, &pred_dense);
  const auto dense_map = max_weight_assignment(table.counts);

  // re-express on the caller's raw ids: map[pred id] = truth id
  std::map<int, int> pred_ids;
  std::map<int, int> truth_ids;
  for (int v : pred) pred_ids.emplace(v, 0);
  for (int v : truth) truth_ids.emplace(v, 0);
  std::vector<int> truth_raw;
  for (auto& [id, _] : truth_ids) truth_raw.push_back(id);

  const int max_pred = pred_ids.rbegin()->first;
  if (pred_ids.begin()->first < 0)
    fail(ErrorKind::InvalidArgument, "predicted labels must be nonnegative");
  std::vector<int> out(static_cast<std::size_t>(max_pred + 1), -1);
  int dense = 0;
  for (auto& [id, _] : pred_ids) {
    const int col = dense_map[static_cast<std::size_t>(dense++)];
    out[static_cast<std::size_t>(id)] = col >= 0 ? truth_raw[static_cast<std::size_t>(col)] : -1;
  }
  return out;
}

double acc(const std::vector<int>& pred, const std::vector<int>& truth) {
  const auto map = best_mapping(pred, truth);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (map[static_cast<std::size_t>(pred[i])] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_lengths(pred, truth);
  const Contingency t = contingency(pred, truth);
  if (t.pred_classes == 1 && t.truth_classes == 1) return 1.0;
  const double n = static_cast<double>(pred.size());
  const Eigen::VectorXd pp = t.counts.rowwise().sum() / n;
  const Eigen::RowVectorXd pq = t.counts.colwise().sum() / n;
  auto entropy = [](const auto& p) {
    double h = 0.0;
    for (Index i = 0; i < p.size(); ++i)
      if (p(i) > 0.0) h -= p(i) * std::log(p(i));
    return h;
  };
  const double hp = entropy(pp);
  const double hq = entropy(pq);
  if (hp <= 0.0 || hq <= 0.0) return 0.0;
  double mi = 0.0;
  for (Index a = 0; a < t.counts.rows(); ++a)
    for (Index b = 0; b < t.counts.cols(); ++b) {
      const double pab = t.counts(a, b) / n;
      if (pab > 0.0) mi += pab * std::log(pab / (pp(a) * pq(b)));
    }
  return std::clamp(mi / std::sqrt(hp * hq), 0.0, 1.0);
}

ClusteringEval evaluate_selection(const DataMatrix& x, const std::vector<Index>& selected,
                                  const LabelVector& truth, const EvalOptions& options) {
  if (selected.empty()) fail(ErrorKind::InvalidArgument, "selected feature set is empty");
  if (static_cast<Index>(truth.size()) != x.rows())
    fail(ErrorKind::InvalidArgument, "label count " + std::to_string(truth.size()) +
                                         " does not match sample count " +
                                         std::to_string(x.rows()));
  if (options.runs < 1) fail(ErrorKind::InvalidArgument, "runs must be at least 1");
  const Eigen::MatrixXd y = x.select_columns(selected).values();

  ClusteringEval out;
  out.runs = options.runs;
  out.per_run.resize(static_cast<std::size_t>(options.runs));
  auto run_one = [&](int r) {
    auto km = kmeans(y, truth.classes, options.seed + static_cast<std::uint64_t>(r),
                     options.kmeans);
    auto& slot = out.per_run[static_cast<std::size_t>(r)];
    slot.acc = acc(km.labels, truth.labels);
    slot.nmi = nmi(km.labels, truth.labels);
    slot.labels = std::move(km.labels);
  };

  const int workers = std::clamp(options.threads, 1, options.runs);
  if (workers == 1) {
    for (int r = 0; r < options.runs; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int r = next++; r < options.runs; r = next++) run_one(r);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (const auto& r : out.per_run) {
    out.acc_mean += r.acc;
    out.nmi_mean += r.nmi;
  }
  out.acc_mean /= options.runs;
  out.nmi_mean /= options.runs;
  for (const auto& r : out.per_run) {
    out.acc_std += (r.acc - out.acc_mean) * (r.acc - out.acc_mean);
    out.nmi_std += (r.nmi - out.nmi_mean) * (r.nmi - out.nmi_mean);
  }
  out.acc_std = std::sqrt(out.acc_std / options.runs);
  out.nmi_std = std::sqrt(out.nmi_std / options.runs);
  return out;
}

}  // namespace glossfs
