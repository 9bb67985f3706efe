#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cellac {

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 12;
  std::size_t min_leaf = 2;
  /// Features tried per split; 0 means a third of the non-constant features,
  /// rounded up (the usual choice for regression forests).
  std::size_t feature_subsample = 0;
  std::uint64_t seed = 1;
};

struct TrainingSample {
  std::vector<double> x;
  double y = 0.0;
};

/// Regression forest with bootstrap sampling and variance-reduction splits.
class Forest {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  using Tree = std::vector<Node>;

  Forest() = default;
  Forest(std::vector<std::string> names, std::vector<Tree> trees, std::vector<double> importance,
         ForestParams params = {});

  /// Deterministic for a given seed and independent of sample order. Throws
  /// std::invalid_argument for an empty training set, non-finite targets or
  /// rows whose width differs from `names`.
  static Forest fit(std::vector<std::string> names, std::vector<TrainingSample> samples, const ForestParams& params);

  /// Throws std::invalid_argument when the width does not match the schema.
  double predict(std::span<const double> x) const;
  /// Also checks feature names against the schema.
  double predict(const FeatureVector& x) const;

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Tree>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }
  /// Normalized impurity decrease per feature; all zeros without splits.
  const std::vector<double>& importance() const { return importance_; }
  std::vector<std::pair<std::string, double>> named_importance() const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& file) const;
  /// Throws std::runtime_error on malformed input.
  static Forest load(std::istream& in);
  static Forest load(const std::filesystem::path& file);

 private:
  std::vector<std::string> names_;
  std::vector<Tree> trees_;
  std::vector<double> importance_;
  ForestParams params_;
};

}  // namespace cellac
