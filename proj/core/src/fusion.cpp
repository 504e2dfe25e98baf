#include "drfi/fusion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <string>

#include "drfi/error.hpp"

namespace drfi {

FusionWeights average_weights(std::size_t layers) {
  if (layers == 0) throw InvalidInput("averaging needs at least one layer");
  return FusionWeights(layers, 1.0 / static_cast<double>(layers));
}

SaliencyMap layer_map(const Segmentation& seg, std::span<const double> region_scores) {
  if (region_scores.size() != static_cast<std::size_t>(seg.region_count)) {
    throw InvalidInput("layer has " + std::to_string(seg.region_count) + " regions but " +
                       std::to_string(region_scores.size()) + " scores");
  }
  SaliencyMap map(seg.width, seg.height);
  for (std::size_t i = 0; i < seg.labels.size(); ++i) map[i] = region_scores[static_cast<std::size_t>(seg.labels[i])];
  return map;
}

SaliencyMap fuse_raw(std::span<const SaliencyMap> maps, std::span<const double> weights) {
  if (maps.empty()) throw InvalidInput("nothing to fuse");
  if (maps.size() != weights.size()) {
    throw InvalidInput("fusing " + std::to_string(maps.size()) + " maps with " + std::to_string(weights.size()) +
                       " weights");
  }
  SaliencyMap out(maps.front().width(), maps.front().height(), 0.0);
  for (std::size_t m = 0; m < maps.size(); ++m) {
    if (!maps[m].same_shape(out)) throw InvalidInput("fusion maps differ in size");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights[m] * maps[m][i];
  }
  return out;
}

void normalize_min_max(SaliencyMap& map) {
  if (map.empty()) return;
  const auto [lo, hi] = std::minmax_element(map.begin(), map.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (auto& v : map) v = range > 0.0 ? (v - min) / range : 0.0;
}

SaliencyMap fuse(std::span<const SaliencyMap> maps, std::span<const double> weights) {
  SaliencyMap out = fuse_raw(maps, weights);
  normalize_min_max(out);
  return out;
}

namespace {

template <typename Truth>
std::size_t check_layers(std::span<const std::vector<SaliencyMap>> layers_per_image, std::span<const Truth> truths) {
  if (layers_per_image.empty()) throw InvalidInput("fusion learning needs at least one image");
  if (layers_per_image.size() != truths.size()) throw InvalidInput("fusion learning: image and mask counts differ");
  const std::size_t m = layers_per_image.front().size();
  if (m == 0) throw InvalidInput("fusion learning needs at least one layer");
  for (std::size_t i = 0; i < layers_per_image.size(); ++i) {
    if (layers_per_image[i].size() != m) throw InvalidInput("images have different layer counts");
    for (const auto& map : layers_per_image[i]) {
      if (!map.same_shape(truths[i])) throw InvalidInput("layer map and mask differ in size for image " + std::to_string(i));
    }
  }
  return m;
}

double target(std::uint8_t v) { return v != 0 ? 1.0 : 0.0; }
double target(double v) { return v; }

template <typename Truth>
FusionWeights solve(std::span<const std::vector<SaliencyMap>> layers_per_image, std::span<const Truth> truths) {
  FusionFitter fitter(check_layers(layers_per_image, truths));
  for (std::size_t img = 0; img < layers_per_image.size(); ++img) fitter.add(layers_per_image[img], truths[img]);
  return fitter.solve();
}

}  // namespace

struct FusionFitter::Normal {
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
};

FusionFitter::FusionFitter(std::size_t layers) : layers_(layers), normal_(std::make_unique<Normal>()) {
  if (layers == 0) throw InvalidInput("fusion learning needs at least one layer");
  const auto dim = static_cast<Eigen::Index>(layers);
  normal_->gram = Eigen::MatrixXd::Zero(dim, dim);
  normal_->rhs = Eigen::VectorXd::Zero(dim);
}

FusionFitter::~FusionFitter() = default;
FusionFitter::FusionFitter(FusionFitter&&) noexcept = default;
FusionFitter& FusionFitter::operator=(FusionFitter&&) noexcept = default;

template <typename Truth>
void FusionFitter::accumulate(std::span<const SaliencyMap> layers, const Plane<Truth>& truth) {
  if (layers.size() != layers_) {
    throw InvalidInput("expected " + std::to_string(layers_) + " layer maps, got " + std::to_string(layers.size()));
  }
  for (const auto& map : layers) {
    if (!map.same_shape(truth)) throw InvalidInput("layer map and mask differ in size");
  }
  const auto dim = static_cast<Eigen::Index>(layers_);
  Eigen::VectorXd row(dim);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t l = 0; l < layers_; ++l) row[static_cast<Eigen::Index>(l)] = layers[l][i];
    normal_->gram.selfadjointView<Eigen::Lower>().rankUpdate(row);
    normal_->rhs += row * target(truth[i]);
  }
  ++images_;
}

void FusionFitter::add(std::span<const SaliencyMap> layers, const Mask& truth) { accumulate(layers, truth); }
void FusionFitter::add(std::span<const SaliencyMap> layers, const SaliencyMap& target) { accumulate(layers, target); }

FusionWeights FusionFitter::solve() const {
  if (images_ == 0) throw InvalidInput("fusion learning needs at least one image");
  Eigen::MatrixXd gram = normal_->gram;
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  const Eigen::VectorXd w = gram.completeOrthogonalDecomposition().solve(normal_->rhs);
  return FusionWeights(w.data(), w.data() + w.size());
}

FusionWeights learn_weights(std::span<const std::vector<SaliencyMap>> layers_per_image, std::span<const Mask> truths) {
  return solve(layers_per_image, truths);
}

FusionWeights learn_weights(std::span<const std::vector<SaliencyMap>> layers_per_image,
                            std::span<const SaliencyMap> targets) {
  return solve(layers_per_image, targets);
}

double fusion_loss(std::span<const std::vector<SaliencyMap>> layers_per_image, std::span<const Mask> truths,
                   std::span<const double> weights) {
  check_layers(layers_per_image, truths);
  double loss = 0.0;
  for (std::size_t img = 0; img < layers_per_image.size(); ++img) {
    const auto raw = fuse_raw(layers_per_image[img], weights);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const double d = (truths[img][i] != 0 ? 1.0 : 0.0) - raw[i];
      loss += d * d;
    }
  }
  return loss;
}

}  // namespace drfi
