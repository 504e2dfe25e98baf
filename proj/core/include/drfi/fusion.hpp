#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "drfi/image.hpp"
#include "drfi/segmentation.hpp"

namespace drfi {

/// Linear weights w_m, one per layer.
using FusionWeights = std::vector<double>;

/// 1/M for each of M layers.
FusionWeights average_weights(std::size_t layers);

/// Paints every pixel with its region's score. Throws InvalidInput when the
/// score count differs from the region count.
SaliencyMap layer_map(const Segmentation& seg, std::span<const double> region_scores);

/// sum_m w_m A_m, unnormalized.
SaliencyMap fuse_raw(std::span<const SaliencyMap> maps, std::span<const double> weights);

/// fuse_raw() followed by min-max normalization; a constant result maps to zeros.
SaliencyMap fuse(std::span<const SaliencyMap> maps, std::span<const double> weights);

/// Rescales to [0,1] by min-max; constant maps become all zeros.
void normalize_min_max(SaliencyMap& map);

/// Least-squares weights minimizing sum over images of |mask - sum_m w_m A_m|_F^2.
/// The normal equations are solved by a complete orthogonal decomposition, which
/// yields the minimum-norm solution when they are rank deficient.
FusionWeights learn_weights(std::span<const std::vector<SaliencyMap>> layers_per_image, std::span<const Mask> truths);
/// Same fit against real-valued targets.
FusionWeights learn_weights(std::span<const std::vector<SaliencyMap>> layers_per_image,
                            std::span<const SaliencyMap> targets);

/// Streaming form of learn_weights(): accumulates the normal equations one
/// image at a time so a corpus never has to be held in memory.
class FusionFitter {
 public:
  explicit FusionFitter(std::size_t layers);
  ~FusionFitter();
  FusionFitter(FusionFitter&&) noexcept;
  FusionFitter& operator=(FusionFitter&&) noexcept;

  void add(std::span<const SaliencyMap> layers, const Mask& truth);
  void add(std::span<const SaliencyMap> layers, const SaliencyMap& target);
  std::size_t images() const { return images_; }
  /// Minimum-norm least-squares weights. Throws InvalidInput before any add().
  FusionWeights solve() const;

 private:
  struct Normal;
  template <typename Truth>
  void accumulate(std::span<const SaliencyMap> layers, const Plane<Truth>& truth);

  std::size_t layers_;
  std::size_t images_ = 0;
  std::unique_ptr<Normal> normal_;
};

/// Frobenius loss of `weights` summed over images.
double fusion_loss(std::span<const std::vector<SaliencyMap>> layers_per_image, std::span<const Mask> truths,
                   std::span<const double> weights);

}  // namespace drfi
