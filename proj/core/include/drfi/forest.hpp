#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace drfi {

/// Row-major sample matrix with one label per row.
struct TrainingSet {
  std::size_t dims = 0;
  std::vector<double> features;
  std::vector<double> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * dims, dims}; }
  void append(std::span<const double> x, double label);
  void append(const TrainingSet& other);
};

struct ForestParams {
  int trees = 200;
  int features_per_node = 15;  ///< m, features sampled without replacement at each node
  int leaf_min = 5;            ///< nodes with fewer samples become leaves
  std::uint64_t seed = 1;
  /// Off = test mode: every tree sees the full set and every feature at every node.
  bool bootstrap = true;
  bool feature_sampling = true;
};

struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  ///< mean label of the training samples that reached the node
  std::uint32_t count = 0;
  bool is_leaf() const { return feature < 0; }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  /// x[f] < threshold goes left.
  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }

 private:
  std::vector<TreeNode> nodes_;
};

class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(std::size_t dims, ForestParams params, std::vector<DecisionTree> trees, std::vector<double> importance);

  /// Mean of the per-tree leaf predictions. Throws InvalidInput on a dimension mismatch.
  double predict(std::span<const double> x) const;

  std::size_t dims() const { return dims_; }
  const ForestParams& params() const { return params_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  /// Non-negative, sums to 1.
  const std::vector<double>& feature_importance() const { return importance_; }

  void write(std::ostream& out) const;
  static ForestModel read(std::istream& in);

  bool operator==(const ForestModel&) const;

 private:
  std::size_t dims_ = 0;
  ForestParams params_;
  std::vector<DecisionTree> trees_;
  std::vector<double> importance_;
};

/// Split criterion on label sums:
/// (sum_l)^2/n_l + (sum_r)^2/n_r - (sum_l + sum_r)^2/(n_l + n_r).
/// Equals the squared-error reduction of the split, hence >= 0.
double split_gain(double sum_left, std::size_t n_left, double sum_right, std::size_t n_right);

/// Gain of a concrete partition of labels.
double split_gain(std::span<const double> left, std::span<const double> right);

/// Midpoints between consecutive distinct values of a sorted sequence,
/// uniformly subsampled down to at most `cap`.
std::vector<double> threshold_candidates(std::span<const double> sorted_values, std::size_t cap = 255);

/// Grows params.trees trees on up to `threads` workers. Each tree draws from
/// its own generator stream derived from the seed, so results do not depend
/// on the thread count.
ForestModel train_forest(const TrainingSet& data, const ForestParams& params, int threads = 1);

}  // namespace drfi
