#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace glossfs {

using Index = Eigen::Index;

// Dense sample matrix, one row per sample. Entries are always finite.
class DataMatrix {
 public:
  // Throws InvalidArgument when n < 2, d < 1 or an entry is not finite.
  explicit DataMatrix(Eigen::MatrixXd values, bool normalized = false);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  bool normalized() const noexcept { return normalized_; }

  // Keeps only the listed columns, in the given order.
  DataMatrix select_columns(const std::vector<Index>& columns) const;

 private:
  Eigen::MatrixXd values_;
  bool normalized_ = false;
};

// Class ids re-indexed to the dense range [0, classes).
struct LabelVector {
  std::vector<int> labels;
  int classes = 0;

  // Maps arbitrary integer ids to [0, c) in ascending id order.
  static LabelVector from_raw(const std::vector<long long>& raw);
  std::size_t size() const noexcept { return labels.size(); }
};

struct NormalizedMatrix {
  DataMatrix matrix;
  std::vector<Index> zero_columns;
};

struct PlantedInstance {
  DataMatrix matrix;
  std::vector<Index> true_features;  // sorted ascending
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  // Filled only when the instance was generated with class structure.
  LabelVector labels;
};

struct PlantedOptions {
  Index n = 50;
  Index d = 20;
  Index kappa = 4;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  // Planted columns mixed into each remaining column; 0 means all of them.
  Index mix = 0;
  // With classes > 0, samples are assigned round-robin to classes and the
  // planted columns carry class-dependent offsets of this size.
  int classes = 0;
  double separation = 4.0;
};

// CSV with '.' decimals, optional header line, LF or CRLF endings.
DataMatrix load_matrix(const std::filesystem::path& path, bool has_header);
DataMatrix parse_matrix(const std::string& text, bool has_header);
void save_matrix(const DataMatrix& matrix, const std::filesystem::path& path);

// One integer per line.
LabelVector load_labels(const std::filesystem::path& path);
LabelVector parse_labels(const std::string& text);
void save_labels(const LabelVector& labels, const std::filesystem::path& path);

// Scales every nonzero column to unit l2 norm. Zero columns are returned in
// zero_columns and left untouched.
NormalizedMatrix normalize_features(const DataMatrix& x);

PlantedInstance synthesize_planted(const PlantedOptions& options);

}  // namespace glossfs
