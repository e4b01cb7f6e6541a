#include <doctest.h>

#include <fstream>

#include "glossfs/dataset.hpp"
#include "glossfs/error.hpp"
#include "support.hpp"

using namespace glossfs;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string error_of(const std::string& csv, bool header = false) {
  try {
    parse_matrix(csv, header);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// Residual of `target` after least-squares projection on the listed columns.
double span_residual(const Eigen::MatrixXd& x, const std::vector<Index>& cols,
                     const Eigen::VectorXd& target) {
  Eigen::MatrixXd basis(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) basis.col(static_cast<Index>(j)) = x.col(cols[j]);
  const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(target);
  return (target - basis * coef).norm();
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("parses a small CSV") {
  const auto m = parse_matrix("1,0\n0,1\n0,0", false);
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 2);
  CHECK_FALSE(m.normalized());
  CHECK(m.values()(1, 1) == 1.0);
}

TEST_CASE("header line, CRLF and trailing newline") {
  const auto m = parse_matrix("a,b\r\n1.5,-2e-3\r\n3,4\r\n", true);
  CHECK(m.rows() == 2);
  CHECK(m.values()(0, 1) == doctest::Approx(-2e-3));
}

TEST_CASE("non-numeric cell names the row") {
  const auto msg = error_of("a,b\n1,2\n", false);
  CHECK(msg.find("row 1") != std::string::npos);
  CHECK(msg.find("column 1") != std::string::npos);
}

TEST_CASE("ragged rows, empty input and whitespace delimiters are rejected") {
  CHECK(error_of("1,2\n3\n").find("row 2") != std::string::npos);
  CHECK_THROWS_AS(parse_matrix("", false), Error);
  CHECK_THROWS_AS(parse_matrix("x,y\n", true), Error);
  CHECK_THROWS_AS(parse_matrix("1 2\n3 4\n", false), Error);
}

TEST_CASE("missing file is an I/O error") {
  try {
    load_matrix("/nonexistent/glossfs.csv", false);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("invariants: finite entries and at least two rows") {
  Eigen::MatrixXd one(1, 3);
  one.setOnes();
  CHECK_THROWS_AS(DataMatrix{one}, Error);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(3, 2);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(DataMatrix{bad}, Error);
}

TEST_CASE("save/load round trip keeps every bit") {
  testing::TempDir dir("dataset");
  const DataMatrix m(testing::random_normal(7, 5, 3) * 1e3);
  save_matrix(m, dir / "m.csv");
  const auto back = load_matrix(dir / "m.csv", false);
  CHECK((back.values().array() == m.values().array()).all());
}

TEST_CASE("normalization: 3-4-5 column, zero column, idempotence") {
  Eigen::MatrixXd v(3, 2);
  v << 3, 0, 4, 0, 0, 0;
  const auto out = normalize_features(DataMatrix(v));
  CHECK(out.matrix.normalized());
  CHECK(out.matrix.values()(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(out.matrix.values()(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(out.matrix.values()(2, 0) == 0.0);
  REQUIRE(out.zero_columns.size() == 1);
  CHECK(out.zero_columns[0] == 1);
  CHECK(out.matrix.values().col(1).isZero(0.0));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto once = normalize_features(DataMatrix(testing::random_normal(9, 6, seed)));
    const auto twice = normalize_features(once.matrix);
    CHECK((once.matrix.values() - twice.matrix.values()).cwiseAbs().maxCoeff() <= 1e-15);
    for (Index j = 0; j < 6; ++j)
      CHECK(std::abs(once.matrix.values().col(j).norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("labels are re-indexed densely") {
  const auto l = parse_labels("10\n-3\n10\n7\n");
  CHECK(l.classes == 3);
  CHECK(l.labels == std::vector<int>{2, 0, 2, 1});
  CHECK_THROWS_AS(parse_labels("1\nx\n"), Error);
  CHECK_THROWS_AS(parse_labels(""), Error);
}

TEST_CASE("planted instance: exact span membership at sigma = 0") {
  PlantedOptions o;
  o.n = 50;
  o.d = 20;
  o.kappa = 4;
  o.noise_sigma = 0.0;
  o.seed = 7;
  const auto inst = synthesize_planted(o);
  REQUIRE(inst.true_features.size() == 4);
  const auto& x = inst.matrix.values();
  for (Index j = 0; j < o.d; ++j)
    CHECK(span_residual(x, inst.true_features, x.col(j)) <= 1e-10 * (1.0 + x.col(j).norm()));
}

TEST_CASE("planted instance: noise residual bounded by 5 sigma sqrt(n)") {
  PlantedOptions o;
  o.n = 50;
  o.d = 20;
  o.kappa = 4;
  o.noise_sigma = 0.01;
  o.seed = 7;
  const auto inst = synthesize_planted(o);
  const auto& x = inst.matrix.values();
  const double bound = 5.0 * o.noise_sigma * std::sqrt(static_cast<double>(o.n));
  for (Index j = 0; j < o.d; ++j) CHECK(span_residual(x, inst.true_features, x.col(j)) <= bound);
}

TEST_CASE("planted instance: deterministic and validated") {
  PlantedOptions o;
  o.seed = 11;
  o.noise_sigma = 0.1;
  const auto a = synthesize_planted(o);
  const auto b = synthesize_planted(o);
  CHECK((a.matrix.values().array() == b.matrix.values().array()).all());
  CHECK(a.true_features == b.true_features);

  o.kappa = o.d + 1;
  CHECK_THROWS_AS(synthesize_planted(o), Error);
}

TEST_CASE("planted instance with classes carries labels") {
  PlantedOptions o;
  o.n = 30;
  o.classes = 3;
  const auto inst = synthesize_planted(o);
  CHECK(inst.labels.classes == 3);
  CHECK(inst.labels.size() == 30);
}

}  // TEST_SUITE
