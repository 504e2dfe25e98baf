#include "drfi/trainset.hpp"

#include <algorithm>
#include <string>

#include "drfi/error.hpp"
#include "drfi/parallel.hpp"
#include "drfi/pixel_features.hpp"
#include "drfi/regional_descriptors.hpp"

namespace drfi {

void AnnotatedImage::validate() const {
  if (image.empty()) throw InvalidInput(name + ": empty image");
  if (!mask.same_shape(image)) {
    throw InvalidInput(name + ": mask is " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()) +
                       " but image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
  for (const auto v : mask) {
    if (v > 1) throw InvalidInput(name + ": mask is not binary");
  }
}

void SampleConfig::validate() const {
  if (!(purity > 0.5 && purity <= 1.0)) throw InvalidInput("purity must lie in (0.5, 1]");
  if (!(discard_ratio > 0.0)) throw InvalidInput("discard ratio must be positive");
  if (!(sigma_s > 0.0)) throw InvalidInput("sigma_s must be positive");
  if (border_width < 1) throw InvalidInput("border width must be >= 1");
}

SampleReport& SampleReport::operator+=(const SampleReport& other) {
  layers_total += other.layers_total;
  layers_kept += other.layers_kept;
  regions += other.regions;
  positives += other.positives;
  negatives += other.negatives;
  unconfident += other.unconfident;
  return *this;
}

RegionLabel confident_label(std::size_t salient_pixels, std::size_t area, double purity) {
  const double n = static_cast<double>(area);
  if (static_cast<double>(salient_pixels) / n >= purity) return RegionLabel::kSalient;
  if (static_cast<double>(area - salient_pixels) / n >= purity) return RegionLabel::kBackground;
  return RegionLabel::kUnconfident;
}

std::vector<bool> retained_layers(std::span<const Segmentation> layers, double discard_ratio) {
  int finest = 0;
  for (const auto& s : layers) finest = std::max(finest, s.region_count);
  std::vector<bool> keep(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    keep[i] = static_cast<double>(layers[i].region_count) / static_cast<double>(finest) <= discard_ratio;
  }
  return keep;
}

std::vector<std::size_t> salient_counts(const Segmentation& seg, const Mask& mask) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(seg.region_count), 0);
  for (std::size_t i = 0; i < seg.labels.size(); ++i) {
    if (mask[i] != 0) ++counts[static_cast<std::size_t>(seg.labels[i])];
  }
  return counts;
}

SampleFragment generate_samples(const AnnotatedImage& item, const SampleConfig& config, int threads) {
  item.validate();
  config.validate();
  const auto params = config.schedule.params_for(item.image.width(), item.image.height());
  const auto layers = multilevel_segment(item.image, params, threads);
  const auto keep = retained_layers(layers, config.discard_ratio);
  const PixelPlanes planes = compute_planes(item.image, threads);
  const RegionStats background = pseudo_background(planes, config.border_width);

  SampleFragment out;
  out.samples.dims = kDescriptorDims;
  out.report.layers_total = layers.size();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (!keep[l]) continue;
    const auto& seg = layers[l];
    ++out.report.layers_kept;
    out.report.regions += static_cast<std::size_t>(seg.region_count);

    const auto counts = salient_counts(seg, item.mask);
    std::vector<RegionLabel> labels(counts.size());
    bool any_confident = false;
    for (std::size_t r = 0; r < counts.size(); ++r) {
      labels[r] = confident_label(counts[r], seg.region_areas[r], config.purity);
      any_confident = any_confident || labels[r] != RegionLabel::kUnconfident;
    }
    if (!any_confident) {
      out.report.unconfident += counts.size();
      continue;
    }
    const auto descriptors = describe_regions(planes, seg, background, config.sigma_s);
    for (std::size_t r = 0; r < descriptors.size(); ++r) {
      switch (labels[r]) {
        case RegionLabel::kSalient:
          out.samples.append(descriptors[r], 1.0);
          ++out.report.positives;
          break;
        case RegionLabel::kBackground:
          out.samples.append(descriptors[r], 0.0);
          ++out.report.negatives;
          break;
        case RegionLabel::kUnconfident:
          ++out.report.unconfident;
          break;
      }
    }
  }
  return out;
}

SampleFragment build_training_set(std::span<const AnnotatedImage> corpus, const SampleConfig& config, int threads) {
  if (corpus.empty()) throw InvalidInput("training corpus is empty");
  std::vector<SampleFragment> fragments(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) { fragments[i] = generate_samples(corpus[i], config, 1); });

  SampleFragment out;
  out.samples.dims = kDescriptorDims;
  for (const auto& f : fragments) {
    out.samples.append(f.samples);
    out.report += f.report;
  }
  return out;
}

}  // namespace drfi
