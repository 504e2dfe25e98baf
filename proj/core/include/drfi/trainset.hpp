#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "drfi/forest.hpp"
#include "drfi/image.hpp"
#include "drfi/segmentation.hpp"

namespace drfi {

struct AnnotatedImage {
  std::string name;
  Image image;
  Mask mask;  ///< 1 = salient, 0 = background

  /// Throws InvalidInput when sizes differ or the mask is not strictly binary.
  void validate() const;
};

struct SampleConfig {
  SegSchedule schedule{.layers = 48};
  double purity = 0.8;         ///< minimum fraction of one class for a confident region
  double discard_ratio = 0.6;  ///< drop layers with more than this fraction of the finest layer's regions
  double sigma_s = 1.0;
  int border_width = 15;

  void validate() const;
};

struct SampleReport {
  std::size_t layers_total = 0;
  std::size_t layers_kept = 0;
  std::size_t regions = 0;  ///< regions in kept layers
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t unconfident = 0;

  double discard_fraction() const {
    return regions == 0 ? 0.0 : static_cast<double>(unconfident) / static_cast<double>(regions);
  }
  SampleReport& operator+=(const SampleReport& other);
};

struct SampleFragment {
  TrainingSet samples;
  SampleReport report;
};

enum class RegionLabel { kBackground, kSalient, kUnconfident };

/// Salient when salient/area >= purity, background when the background share
/// reaches purity, unconfident otherwise.
RegionLabel confident_label(std::size_t salient_pixels, std::size_t area, double purity);

/// keep[i] = regions(i) / max_j regions(j) <= discard_ratio.
std::vector<bool> retained_layers(std::span<const Segmentation> layers, double discard_ratio);

/// Salient pixel count per region.
std::vector<std::size_t> salient_counts(const Segmentation& seg, const Mask& mask);

SampleFragment generate_samples(const AnnotatedImage& item, const SampleConfig& config, int threads = 1);

/// Concatenates per-image fragments in corpus order. Throws on an empty corpus.
SampleFragment build_training_set(std::span<const AnnotatedImage> corpus, const SampleConfig& config,
                                  int threads = 1);

}  // namespace drfi
