#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "drfi/forest.hpp"
#include "drfi/image.hpp"
#include "drfi/model_io.hpp"
#include "drfi/pixel_features.hpp"
#include "drfi/regional_descriptors.hpp"
#include "drfi/segmentation.hpp"
#include "drfi/trainset.hpp"

namespace drfi {

enum class FusionMode { kAverage, kLearned };

struct PipelineOptions {
  SegSchedule schedule;  ///< test-time layers, 15 by default
  double sigma_s = 1.0;
  int border_width = 15;
  int threads = 1;  ///< layers are processed concurrently
  bool keep_descriptors = false;
};

/// Everything computed for one image, layer by layer.
struct LayeredSaliency {
  std::vector<Segmentation> layers;
  std::vector<std::vector<Descriptor>> descriptors;  ///< filled when keep_descriptors is set
  std::vector<std::vector<double>> scores;            ///< forest output per region
  std::vector<SaliencyMap> maps;                      ///< per-layer maps
};

/// Region scores painted into one map per segmentation.
std::vector<SaliencyMap> layer_maps(const ForestModel& model, const Image& image, std::span<const Segmentation> segs,
                                    double sigma_s = 1.0, int border_width = 15, int threads = 1);

/// Segments with the full schedule, scores every region and paints the layer maps.
LayeredSaliency predict_layers(const ForestModel& model, const Image& image, const PipelineOptions& options);

/// Same as predict_layers() restricted to one parameter set.
LayeredSaliency predict_layers(const ForestModel& model, const Image& image, const PipelineOptions& options,
                               std::span<const SegParams> params);

/// Index of the mid-schedule layer used by the single-layer variant.
std::size_t single_layer_index(std::size_t layers);

/// Final map in [0,1]. Learned mode uses the model's fusion weights and
/// falls back to averaging when the model carries none.
SaliencyMap predict_saliency(const DrfiModel& model, const Image& image, const PipelineOptions& options,
                             FusionMode mode = FusionMode::kAverage, bool single_layer = false);

/// Least-squares fusion weights from the forest's layer maps on annotated images.
FusionWeights fit_fusion(const ForestModel& model, std::span<const AnnotatedImage> corpus,
                         const PipelineOptions& options);

/// Weights for `mode` given a model and a layer count.
FusionWeights fusion_weights_for(const DrfiModel& model, FusionMode mode, std::size_t layers);

}  // namespace drfi
