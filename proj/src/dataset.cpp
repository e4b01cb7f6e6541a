#include "glossfs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string_view>

#include "glossfs/error.hpp"

namespace glossfs {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "read failed for " + path.string());
  return buffer.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  // trailing blank lines are tolerated, interior ones are not
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd values, bool normalized)
    : values_(std::move(values)), normalized_(normalized) {
  if (values_.rows() < 2)
    fail(ErrorKind::InvalidArgument, "data matrix needs at least 2 rows");
  if (values_.cols() < 1)
    fail(ErrorKind::InvalidArgument, "data matrix needs at least 1 column");
  if (!values_.allFinite())
    fail(ErrorKind::InvalidArgument, "data matrix has non-finite entries");
}

DataMatrix DataMatrix::select_columns(const std::vector<Index>& columns) const {
  Eigen::MatrixXd out(rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] < 0 || columns[j] >= cols())
      fail(ErrorKind::InvalidArgument,
           "column index " + std::to_string(columns[j]) + " out of range");
    out.col(static_cast<Index>(j)) = values_.col(columns[j]);
  }
  return DataMatrix(std::move(out), normalized_);
}

LabelVector LabelVector::from_raw(const std::vector<long long>& raw) {
  std::map<long long, int> ids;
  for (auto v : raw) ids.emplace(v, 0);
  int next = 0;
  for (auto& [id, dense] : ids) dense = next++;
  LabelVector out;
  out.classes = next;
  out.labels.reserve(raw.size());
  for (auto v : raw) out.labels.push_back(ids.at(v));
  return out;
}

DataMatrix parse_matrix(const std::string& text, bool has_header) {
  auto lines = split_lines(text);
  std::size_t first = has_header ? 1 : 0;
  if (lines.size() <= first) fail(ErrorKind::Parse, "empty matrix file");

  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  for (std::size_t li = first; li < lines.size(); ++li) {
    const std::size_t row_number = li - first + 1;
    std::vector<double> row;
    std::string_view line = lines[li];
    std::size_t col = 0;
    for (;;) {
      auto comma = line.find(',');
      auto field = line.substr(0, comma);
      double v = 0.0;
      if (!parse_double(field, v))
        fail(ErrorKind::Parse, "non-numeric value '" + std::string(trim(field)) +
                                   "' at row " + std::to_string(row_number) +
                                   ", column " + std::to_string(col + 1));
      row.push_back(v);
      ++col;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      fail(ErrorKind::Parse, "row " + std::to_string(row_number) + " has " +
                                 std::to_string(row.size()) + " fields, expected " +
                                 std::to_string(width));
    }
    rows.push_back(std::move(row));
  }

  Eigen::MatrixXd values(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return DataMatrix(std::move(values));
}

DataMatrix load_matrix(const std::filesystem::path& path, bool has_header) {
  return parse_matrix(read_file(path), has_header);
}

void save_matrix(const DataMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  const auto& v = matrix.values();
  for (Index i = 0; i < v.rows(); ++i) {
    for (Index j = 0; j < v.cols(); ++j) {
      if (j) out << ',';
      out << format_double(v(i, j));
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

LabelVector parse_labels(const std::string& text) {
  auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorKind::Parse, "empty label file");
  std::vector<long long> raw;
  raw.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto field = trim(lines[i]);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
      fail(ErrorKind::Parse, "label at line " + std::to_string(i + 1) +
                                 " is not an integer: '" + std::string(field) + "'");
    raw.push_back(v);
  }
  return LabelVector::from_raw(raw);
}

LabelVector load_labels(const std::filesystem::path& path) {
  return parse_labels(read_file(path));
}

void save_labels(const LabelVector& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  for (int v : labels.labels) out << v << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

NormalizedMatrix normalize_features(const DataMatrix& x) {
  Eigen::MatrixXd values = x.values();
  std::vector<Index> zero_columns;
  for (Index j = 0; j < values.cols(); ++j) {
    const double norm = values.col(j).norm();
    if (norm == 0.0) {
      zero_columns.push_back(j);
    } else if (norm != 1.0) {
      values.col(j) /= norm;
    }
  }
  return {DataMatrix(std::move(values), true), std::move(zero_columns)};
}

PlantedInstance synthesize_planted(const PlantedOptions& o) {
  if (o.kappa < 1) fail(ErrorKind::InvalidArgument, "kappa must be at least 1");
  if (o.kappa > o.d)
    fail(ErrorKind::InvalidArgument, "kappa (" + std::to_string(o.kappa) +
                                         ") exceeds feature count d (" +
                                         std::to_string(o.d) + ")");
  if (o.n < o.kappa) fail(ErrorKind::InvalidArgument, "n must be at least kappa");
  if (o.noise_sigma < 0.0) fail(ErrorKind::InvalidArgument, "noise_sigma must be >= 0");
  if (o.mix < 0 || o.mix > o.kappa)
    fail(ErrorKind::InvalidArgument, "mix must lie in [0, kappa]");

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<Index> all(static_cast<std::size_t>(o.d));
  for (Index j = 0; j < o.d; ++j) all[static_cast<std::size_t>(j)] = j;
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<Index> planted(all.begin(), all.begin() + o.kappa);
  std::sort(planted.begin(), planted.end());

  std::vector<long long> raw_labels;
  Eigen::MatrixXd centers;
  if (o.classes > 0) {
    centers.resize(o.classes, o.kappa);
    for (Index c = 0; c < o.classes; ++c)
      for (Index j = 0; j < o.kappa; ++j) centers(c, j) = o.separation * normal(rng);
    for (Index i = 0; i < o.n; ++i) raw_labels.push_back(i % o.classes);
  }

  Eigen::MatrixXd base(o.n, o.kappa);
  for (Index j = 0; j < o.kappa; ++j)
    for (Index i = 0; i < o.n; ++i) base(i, j) = normal(rng);
  if (o.classes > 0)
    for (Index i = 0; i < o.n; ++i) base.row(i) += centers.row(i % o.classes);

  Eigen::MatrixXd values(o.n, o.d);
  std::vector<bool> is_planted(static_cast<std::size_t>(o.d), false);
  for (Index j = 0; j < o.kappa; ++j) {
    values.col(planted[static_cast<std::size_t>(j)]) = base.col(j);
    is_planted[static_cast<std::size_t>(planted[static_cast<std::size_t>(j)])] = true;
  }

  const Index mix = o.mix == 0 ? o.kappa : o.mix;
  std::vector<Index> order(static_cast<std::size_t>(o.kappa));
  for (Index j = 0; j < o.d; ++j) {
    if (is_planted[static_cast<std::size_t>(j)]) continue;
    for (Index t = 0; t < o.kappa; ++t) order[static_cast<std::size_t>(t)] = t;
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::VectorXd col = Eigen::VectorXd::Zero(o.n);
    for (Index t = 0; t < mix; ++t) col += uniform(rng) * base.col(order[static_cast<std::size_t>(t)]);
    if (o.noise_sigma > 0.0)
      for (Index i = 0; i < o.n; ++i) col(i) += o.noise_sigma * normal(rng);
    values.col(j) = col;
  }

  PlantedInstance out{DataMatrix(std::move(values)), std::move(planted),
                      o.noise_sigma, o.seed, {}};
  if (o.classes > 0) out.labels = LabelVector::from_raw(raw_labels);
  return out;
}

}  // namespace glossfs
