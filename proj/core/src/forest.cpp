#include "drfi/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "binary_io.hpp"
#include "drfi/error.hpp"
#include "drfi/parallel.hpp"
#include "drfi/random.hpp"

namespace drfi {

void TrainingSet::append(std::span<const double> x, double label) {
  if (dims == 0 && labels.empty()) dims = x.size();
  if (x.size() != dims) {
    throw InvalidInput("training sample has " + std::to_string(x.size()) + " features, expected " +
                       std::to_string(dims));
  }
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(label);
}

void TrainingSet::append(const TrainingSet& other) {
  if (other.empty()) return;
  if (empty() && dims == 0) dims = other.dims;
  if (other.dims != dims) throw InvalidInput("cannot concatenate training sets of different dimension");
  features.insert(features.end(), other.features.begin(), other.features.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

double DecisionTree::predict(std::span<const double> x) const {
  std::size_t n = 0;
  while (!nodes_[n].is_leaf()) {
    const auto& node = nodes_[n];
    n = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right);
  }
  return nodes_[n].value;
}

ForestModel::ForestModel(std::size_t dims, ForestParams params, std::vector<DecisionTree> trees,
                         std::vector<double> importance)
    : dims_(dims), params_(params), trees_(std::move(trees)), importance_(std::move(importance)) {}

double ForestModel::predict(std::span<const double> x) const {
  if (x.size() != dims_) {
    throw InvalidInput("forest expects " + std::to_string(dims_) + " features, got " + std::to_string(x.size()));
  }
  if (trees_.empty()) throw InvalidInput("forest has no trees");
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict(x);
  return sum / static_cast<double>(trees_.size());
}

bool ForestModel::operator==(const ForestModel& other) const {
  if (dims_ != other.dims_ || importance_ != other.importance_ || trees_.size() != other.trees_.size()) return false;
  const auto& p = params_;
  const auto& q = other.params_;
  if (p.trees != q.trees || p.features_per_node != q.features_per_node || p.leaf_min != q.leaf_min ||
      p.seed != q.seed || p.bootstrap != q.bootstrap || p.feature_sampling != q.feature_sampling) {
    return false;
  }
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    const auto& a = trees_[t].nodes();
    const auto& b = other.trees_[t].nodes();
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].feature != b[i].feature || a[i].left != b[i].left || a[i].right != b[i].right ||
          a[i].count != b[i].count ||
          std::bit_cast<std::uint64_t>(a[i].threshold) != std::bit_cast<std::uint64_t>(b[i].threshold) ||
          std::bit_cast<std::uint64_t>(a[i].value) != std::bit_cast<std::uint64_t>(b[i].value)) {
        return false;
      }
    }
  }
  return true;
}

void ForestModel::write(std::ostream& out) const {
  using namespace binary;
  put_u32(out, static_cast<std::uint32_t>(dims_));
  put_u32(out, static_cast<std::uint32_t>(params_.trees));
  put_u32(out, static_cast<std::uint32_t>(params_.features_per_node));
  put_u32(out, static_cast<std::uint32_t>(params_.leaf_min));
  put_u64(out, params_.seed);
  put_u8(out, static_cast<std::uint8_t>((params_.bootstrap ? 1 : 0) | (params_.feature_sampling ? 2 : 0)));
  for (const double v : importance_) put_f64(out, v);
  put_u32(out, static_cast<std::uint32_t>(trees_.size()));
  for (const auto& tree : trees_) {
    put_u32(out, static_cast<std::uint32_t>(tree.nodes().size()));
    for (const auto& n : tree.nodes()) {
      put_i32(out, n.feature);
      put_f64(out, n.threshold);
      put_i32(out, n.left);
      put_i32(out, n.right);
      put_f64(out, n.value);
      put_u32(out, n.count);
    }
  }
}

ForestModel ForestModel::read(std::istream& in) {
  using namespace binary;
  const std::size_t dims = get_u32(in, "feature count");
  ForestParams params;
  params.trees = static_cast<int>(get_u32(in, "tree count"));
  params.features_per_node = static_cast<int>(get_u32(in, "features per node"));
  params.leaf_min = static_cast<int>(get_u32(in, "leaf minimum"));
  params.seed = get_u64(in, "seed");
  const auto flags = get_u8(in, "flags");
  params.bootstrap = (flags & 1) != 0;
  params.feature_sampling = (flags & 2) != 0;
  if (dims == 0 || dims > (1u << 20)) throw DataError("implausible feature count " + std::to_string(dims));

  std::vector<double> importance(dims);
  for (auto& v : importance) v = get_f64(in, "feature importance");
  const std::size_t tree_count = get_u32(in, "stored tree count");
  if (tree_count == 0 || tree_count > (1u << 20)) throw DataError("implausible tree count " + std::to_string(tree_count));

  std::vector<DecisionTree> trees;
  trees.reserve(tree_count);
  for (std::size_t t = 0; t < tree_count; ++t) {
    const std::size_t node_count = get_u32(in, "node count");
    if (node_count == 0 || node_count > (1u << 28)) throw DataError("implausible node count in tree " + std::to_string(t));
    std::vector<TreeNode> nodes(node_count);
    for (auto& n : nodes) {
      n.feature = get_i32(in, "node feature");
      n.threshold = get_f64(in, "node threshold");
      n.left = get_i32(in, "left child");
      n.right = get_i32(in, "right child");
      n.value = get_f64(in, "node value");
      n.count = get_u32(in, "node count");
    }
    // Children always follow their parent, which rules out cycles.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      if (n.is_leaf()) continue;
      const auto ok = [&](int c) { return c > static_cast<int>(i) && static_cast<std::size_t>(c) < nodes.size(); };
      if (static_cast<std::size_t>(n.feature) >= dims || !ok(n.left) || !ok(n.right)) {
        throw DataError("corrupt node " + std::to_string(i) + " in tree " + std::to_string(t));
      }
    }
    trees.emplace_back(std::move(nodes));
  }
  return ForestModel(dims, params, std::move(trees), std::move(importance));
}

double split_gain(double sum_left, std::size_t n_left, double sum_right, std::size_t n_right) {
  const double nl = static_cast<double>(n_left);
  const double nr = static_cast<double>(n_right);
  const double total = sum_left + sum_right;
  return sum_left * sum_left / nl + sum_right * sum_right / nr - total * total / (nl + nr);
}

double split_gain(std::span<const double> left, std::span<const double> right) {
  if (left.empty() || right.empty()) throw InvalidInput("split_gain needs two non-empty children");
  return split_gain(std::accumulate(left.begin(), left.end(), 0.0), left.size(),
                    std::accumulate(right.begin(), right.end(), 0.0), right.size());
}

std::vector<double> threshold_candidates(std::span<const double> sorted_values, std::size_t cap) {
  std::vector<double> mids;
  for (std::size_t i = 1; i < sorted_values.size(); ++i) {
    if (sorted_values[i] != sorted_values[i - 1]) mids.push_back(0.5 * (sorted_values[i - 1] + sorted_values[i]));
  }
  if (cap == 0 || mids.size() <= cap) return mids;
  std::vector<double> out(cap);
  for (std::size_t i = 0; i < cap; ++i) out[i] = mids[i * mids.size() / cap];
  return out;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

class TreeGrower {
 public:
  TreeGrower(const TrainingSet& data, const ForestParams& params, Rng rng)
      : data_(data), params_(params), rng_(std::move(rng)), importance_(data.dims, 0.0) {}

  DecisionTree grow() {
    const std::size_t q = data_.size();
    indices_.resize(q);
    if (params_.bootstrap) {
      for (auto& i : indices_) i = static_cast<std::size_t>(rng_.below(q));
    } else {
      std::iota(indices_.begin(), indices_.end(), std::size_t{0});
    }

    struct Task {
      std::size_t node;
      std::size_t begin;
      std::size_t end;
    };
    std::vector<TreeNode> nodes(1);
    std::vector<Task> stack{{0, 0, q}};
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      const std::size_t n = task.end - task.begin;
      double sum = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t k = task.begin; k < task.end; ++k) {
        const double a = data_.labels[indices_[k]];
        sum += a;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      nodes[task.node].value = sum / static_cast<double>(n);
      nodes[task.node].count = static_cast<std::uint32_t>(n);
      // A pure node's subtree would predict its own mean everywhere.
      if (n < static_cast<std::size_t>(params_.leaf_min) || lo == hi) continue;

      Split best = find_split(task.begin, task.end);
      if (best.feature < 0 && params_.feature_sampling) best = find_split(task.begin, task.end);
      if (best.feature < 0) continue;

      const auto f = static_cast<std::size_t>(best.feature);
      const auto mid = std::stable_partition(
          indices_.begin() + static_cast<std::ptrdiff_t>(task.begin), indices_.begin() + static_cast<std::ptrdiff_t>(task.end),
          [&](std::size_t i) { return data_.features[i * data_.dims + f] < best.threshold; });
      const auto split_at = static_cast<std::size_t>(mid - indices_.begin());

      importance_[f] += best.gain;
      const auto left = nodes.size();
      nodes.emplace_back();
      nodes.emplace_back();
      auto& node = nodes[task.node];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = static_cast<int>(left);
      node.right = static_cast<int>(left + 1);
      stack.push_back({left + 1, split_at, task.end});
      stack.push_back({left, task.begin, split_at});
    }
    return DecisionTree(std::move(nodes));
  }

  const std::vector<double>& importance() const { return importance_; }

 private:
  std::vector<std::size_t> sample_features() {
    const std::size_t d = data_.dims;
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (!params_.feature_sampling) return all;
    const auto m = std::min<std::size_t>(static_cast<std::size_t>(params_.features_per_node), d);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(d - i));
      std::swap(all[i], all[j]);
    }
    all.resize(m);
    std::sort(all.begin(), all.end());
    return all;
  }

  // Best split over a fresh feature sample. Ties keep the lowest feature, then the lowest threshold.
  Split find_split(std::size_t begin, std::size_t end) {
    Split best;
    const std::size_t n = end - begin;
    double total = 0.0;
    for (std::size_t k = begin; k < end; ++k) total += data_.labels[indices_[k]];

    for (const std::size_t f : sample_features()) {
      pairs_.clear();
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t i = indices_[k];
        pairs_.emplace_back(data_.features[i * data_.dims + f], data_.labels[i]);
      }
      std::sort(pairs_.begin(), pairs_.end());
      values_.resize(n);
      for (std::size_t k = 0; k < n; ++k) values_[k] = pairs_[k].first;
      const auto candidates = threshold_candidates(values_);

      std::size_t p = 0;
      double left_sum = 0.0;
      for (const double tau : candidates) {
        while (p < n && pairs_[p].first < tau) left_sum += pairs_[p++].second;
        if (p == 0 || p == n) continue;
        const double gain = split_gain(left_sum, p, total - left_sum, n - p);
        const double scale = total * total / static_cast<double>(n) + 1.0;
        if (gain < -1e-9 * scale) {
          throw InvariantViolation("negative split gain " + std::to_string(gain) + " on feature " + std::to_string(f));
        }
        if (gain > best.gain) best = {static_cast<int>(f), tau, std::max(0.0, gain)};
      }
    }
    return best;
  }

  const TrainingSet& data_;
  const ForestParams& params_;
  Rng rng_;
  std::vector<double> importance_;
  std::vector<std::size_t> indices_;
  std::vector<std::pair<double, double>> pairs_;
  std::vector<double> values_;
};

}  // namespace

ForestModel train_forest(const TrainingSet& data, const ForestParams& params, int threads) {
  if (data.empty()) throw InvalidInput("cannot train a forest on an empty training set");
  if (data.dims == 0 || data.features.size() != data.size() * data.dims) {
    throw InvalidInput("training set feature matrix is inconsistent with its labels");
  }
  if (params.trees < 1) throw InvalidInput("forest needs at least one tree");
  if (params.features_per_node < 1 || static_cast<std::size_t>(params.features_per_node) > data.dims) {
    throw InvalidInput("features_per_node must lie in [1, " + std::to_string(data.dims) + "], got " +
                       std::to_string(params.features_per_node));
  }
  if (params.leaf_min < 1) throw InvalidInput("leaf_min must be >= 1");
  for (const double v : data.features) {
    if (!std::isfinite(v)) throw InvalidInput("training features must be finite");
  }

  const auto tree_count = static_cast<std::size_t>(params.trees);
  std::vector<DecisionTree> trees(tree_count);
  std::vector<std::vector<double>> gains(tree_count);
  parallel_for(tree_count, threads, [&](std::size_t t) {
    TreeGrower grower(data, params, Rng(params.seed, t));
    trees[t] = grower.grow();
    gains[t] = grower.importance();
  });

  std::vector<double> importance(data.dims, 0.0);
  for (const auto& g : gains) {
    for (std::size_t f = 0; f < data.dims; ++f) importance[f] += g[f];
  }
  const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : importance) v /= total;
  } else {
    std::fill(importance.begin(), importance.end(), 1.0 / static_cast<double>(data.dims));
  }
  return ForestModel(data.dims, params, std::move(trees), std::move(importance));
}

}  // namespace drfi
