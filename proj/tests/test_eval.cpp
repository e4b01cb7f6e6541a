#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "glossfs/error.hpp"
#include "glossfs/eval.hpp"
#include "glossfs/oracle.hpp"
#include "support.hpp"

using namespace glossfs;

namespace {

// Two tight clouds far apart; labels give cloud membership.
Eigen::MatrixXd two_clouds(Index per_cloud, std::vector<int>& truth, std::uint64_t seed) {
  Eigen::MatrixXd y = 0.1 * testing::random_normal(2 * per_cloud, 3, seed);
  truth.assign(static_cast<std::size_t>(2 * per_cloud), 0);
  for (Index i = per_cloud; i < 2 * per_cloud; ++i) {
    y.row(i).array() += 20.0;
    truth[static_cast<std::size_t>(i)] = 1;
  }
  return y;
}

std::vector<int> random_labels(std::size_t n, int classes, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, classes - 1);
  std::vector<int> out(n);
  for (auto& v : out) v = pick(rng);
  return out;
}

// Best match rate over every bijection of class ids, by enumeration.
double brute_force_acc(const std::vector<int>& pred, const std::vector<int>& truth, int c) {
  std::vector<int> perm(static_cast<std::size_t>(c));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (perm[static_cast<std::size_t>(pred[i])] == truth[i]) ++hits;
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

std::vector<int> relabel(const std::vector<int>& labels, const std::vector<int>& perm) {
  std::vector<int> out;
  for (int v : labels) out.push_back(perm[static_cast<std::size_t>(v)]);
  return out;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("kmeans separates two clouds") {
  std::vector<int> truth;
  const auto y = two_clouds(25, truth, 1);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = kmeans(y, 2, seed);
    CHECK(acc(r.labels, truth) == 1.0);
  }
  KMeansOptions uniform;
  uniform.seeding = Seeding::Uniform;
  CHECK(acc(kmeans(y, 2, 3, uniform).labels, truth) == 1.0);
}

TEST_CASE("kmeans with one cluster per point has zero inertia") {
  const Eigen::MatrixXd y = testing::random_normal(9, 2, 4);
  const auto r = kmeans(y, 9, 7);
  CHECK(r.inertia == 0.0);
  std::set<int> distinct(r.labels.begin(), r.labels.end());
  CHECK(distinct.size() == 9);
}

TEST_CASE("kmeans is deterministic and validated") {
  const Eigen::MatrixXd y = testing::random_normal(40, 3, 5);
  CHECK(kmeans(y, 4, 11).labels == kmeans(y, 4, 11).labels);
  CHECK_THROWS_AS(kmeans(y, 41, 0), Error);
}

TEST_CASE("kmeans handles duplicated points") {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(6, 2);
  y.bottomRows(3).setOnes();
  const auto r = kmeans(y, 3, 2);
  CHECK(r.inertia == 0.0);
}

TEST_CASE("best mapping: identity and swap") {
  const std::vector<int> truth{0, 0, 1, 1, 2};
  const auto id = best_mapping(truth, truth);
  CHECK(id == std::vector<int>{0, 1, 2});
  const std::vector<int> swapped{1, 1, 0, 0, 2};
  CHECK(best_mapping(swapped, truth) == std::vector<int>{1, 0, 2});
  CHECK(acc(swapped, truth) == 1.0);
}

TEST_CASE("assignment equals enumeration on random 6x6 counts") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> count(0, 40);
  for (int c = 0; c < 100; ++c) {
    Eigen::MatrixXd w(6, 6);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j) w(i, j) = count(rng);
    const auto map = max_weight_assignment(w);
    std::set<int> used(map.begin(), map.end());
    CHECK(used.size() == 6);
    double value = 0.0;
    for (Index i = 0; i < 6; ++i) value += w(i, map[static_cast<std::size_t>(i)]);
    CHECK(value == oracle::assignment_oracle(w));
  }
}

TEST_CASE("rectangular assignments") {
  Eigen::MatrixXd w(3, 2);
  w << 1, 9, 8, 1, 7, 7;
  const auto map = max_weight_assignment(w);
  CHECK(map[0] == 1);
  CHECK(map[1] == 0);
  CHECK(map[2] == -1);
  // more clusters than classes: the surplus cluster never matches
  const std::vector<int> pred{0, 1, 2, 2};
  const std::vector<int> truth{0, 1, 1, 1};
  CHECK(acc(pred, truth) == doctest::Approx(0.75));
}

TEST_CASE("acc of a constant prediction on balanced classes is 1/c") {
  for (int c = 2; c <= 7; ++c) {
    std::vector<int> truth;
    for (int k = 0; k < c; ++k)
      for (int r = 0; r < 10; ++r) truth.push_back(k);
    const std::vector<int> pred(truth.size(), 0);
    CHECK(acc(pred, truth) == 1.0 / c);
  }
}

TEST_CASE("acc equals the permutation oracle on random 3-class labelings") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    auto truth = random_labels(30, 3, rng);
    auto pred = random_labels(30, 3, rng);
    truth[0] = 0; truth[1] = 1; truth[2] = 2;
    pred[0] = 0; pred[1] = 1; pred[2] = 2;
    CHECK(acc(pred, truth) == doctest::Approx(brute_force_acc(pred, truth, 3)).epsilon(1e-15));
  }
}

TEST_CASE("nmi examples") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  CHECK(nmi(truth, truth) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nmi(relabel(truth, {2, 0, 1}), truth) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<int> constant(6, 4);
  CHECK(nmi(constant, truth) == 0.0);
  CHECK(nmi(constant, constant) == 1.0);
}

TEST_CASE("nmi of independent labelings is near zero") {
  std::mt19937_64 rng(31);
  const auto a = random_labels(10000, 4, rng);
  const auto b = random_labels(10000, 4, rng);
  CHECK(nmi(a, b) <= 0.05);
}

TEST_CASE("metrics are symmetric and relabeling invariant") {
  std::mt19937_64 rng(37);
  std::vector<int> perm{3, 1, 4, 0, 2};
  for (int t = 0; t < 100; ++t) {
    const auto p = random_labels(60, 5, rng);
    const auto q = random_labels(60, 5, rng);
    CHECK(std::abs(nmi(p, q) - nmi(q, p)) <= 1e-12);
    CHECK(std::abs(nmi(relabel(p, perm), q) - nmi(p, q)) <= 1e-12);
    CHECK(acc(relabel(p, perm), q) == acc(p, q));
    CHECK(acc(p, relabel(q, perm)) == acc(p, q));
  }
}

TEST_CASE("optimal mapping beats any other bijection") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    auto p = random_labels(40, 4, rng);
    auto q = random_labels(40, 4, rng);
    for (int k = 0; k < 4; ++k) p[static_cast<std::size_t>(k)] = q[static_cast<std::size_t>(k)] = k;
    const double best = acc(p, q);
    std::vector<int> perm{0, 1, 2, 3};
    do {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < p.size(); ++i)
        if (perm[static_cast<std::size_t>(p[i])] == q[i]) ++hits;
      CHECK(static_cast<double>(hits) / 40.0 <= best + 1e-15);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("evaluate_selection on trivially clusterable data") {
  std::vector<int> truth;
  const DataMatrix x(two_clouds(20, truth, 2));
  const auto labels = LabelVector::from_raw(std::vector<long long>(truth.begin(), truth.end()));
  const std::vector<Index> all{0, 1, 2};
  EvalOptions options;
  const auto r = evaluate_selection(x, all, labels, options);
  CHECK(r.runs == 20);
  CHECK(r.per_run.size() == 20);
  CHECK(r.acc_mean == 1.0);
  CHECK(r.nmi_mean == doctest::Approx(1.0).epsilon(1e-12));

  options.runs = 1;
  const auto single = evaluate_selection(x, {0}, labels, options);
  CHECK(single.acc_std == 0.0);
  CHECK(single.nmi_std == 0.0);

  CHECK_THROWS_AS(evaluate_selection(x, {}, labels, options), Error);
  const auto short_labels = LabelVector::from_raw({0, 1});
  CHECK_THROWS_AS(evaluate_selection(x, all, short_labels, options), Error);
}

TEST_CASE("threaded evaluation matches the sequential one") {
  std::vector<int> truth;
  const DataMatrix x(two_clouds(15, truth, 8) + 3.0 * testing::random_normal(30, 3, 9));
  const auto labels = LabelVector::from_raw(std::vector<long long>(truth.begin(), truth.end()));
  EvalOptions a;
  a.runs = 6;
  EvalOptions b = a;
  b.threads = 3;
  const auto ra = evaluate_selection(x, {0, 1, 2}, labels, a);
  const auto rb = evaluate_selection(x, {0, 1, 2}, labels, b);
  CHECK(ra.acc_mean == rb.acc_mean);
  CHECK(ra.nmi_std == rb.nmi_std);
}

TEST_CASE("class-carrying features beat equally many noise features") {
  // columns 0..3 carry three well separated classes, the rest is noise
  const Index n = 90, d = 20, informative = 4;
  std::mt19937_64 rng(51);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd v(n, d);
  std::vector<long long> raw;
  Eigen::MatrixXd centers = 4.0 * testing::random_normal(3, informative, 52);
  for (Index i = 0; i < n; ++i) {
    raw.push_back(i % 3);
    for (Index j = 0; j < d; ++j) v(i, j) = normal(rng);
    v.row(i).head(informative) += centers.row(i % 3);
  }
  const auto x = normalize_features(DataMatrix(v)).matrix;
  const auto labels = LabelVector::from_raw(raw);
  const auto planted = evaluate_selection(x, {0, 1, 2, 3}, labels);
  const auto noise = evaluate_selection(x, {7, 11, 15, 18}, labels);
  CHECK(planted.acc_mean > noise.acc_mean);
}

}  // TEST_SUITE
