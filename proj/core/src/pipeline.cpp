#include "drfi/pipeline.hpp"

#include <map>
#include <string>

#include "drfi/error.hpp"
#include "drfi/fusion.hpp"
#include "drfi/parallel.hpp"

namespace drfi {
namespace {

std::vector<double> score_regions(const ForestModel& model, std::span<const Descriptor> descriptors) {
  std::vector<double> scores(descriptors.size());
  for (std::size_t r = 0; r < descriptors.size(); ++r) scores[r] = model.predict(descriptors[r]);
  return scores;
}

}  // namespace

std::vector<SaliencyMap> layer_maps(const ForestModel& model, const Image& image, std::span<const Segmentation> segs,
                                    double sigma_s, int border_width, int threads) {
  const PixelPlanes planes = compute_planes(image, threads);
  const RegionStats background = pseudo_background(planes, border_width);
  std::vector<SaliencyMap> maps(segs.size());
  parallel_for(segs.size(), threads, [&](std::size_t l) {
    if (segs[l].width != image.width() || segs[l].height != image.height()) {
      throw InvalidInput("segmentation " + std::to_string(l) + " does not match the image size");
    }
    const auto descriptors = describe_regions(planes, segs[l], background, sigma_s);
    maps[l] = layer_map(segs[l], score_regions(model, descriptors));
  });
  return maps;
}

LayeredSaliency predict_layers(const ForestModel& model, const Image& image, const PipelineOptions& options,
                               std::span<const SegParams> params) {
  if (image.empty()) throw InvalidInput("cannot predict saliency of an empty image");
  if (params.empty()) throw InvalidInput("no segmentation layers configured");
  for (const auto& p : params) p.validate();
  const int threads = options.threads;

  const PixelPlanes planes = compute_planes(image, threads);
  const RegionStats background = pseudo_background(planes, options.border_width);

  std::map<std::pair<double, int>, PixelGraph> graphs;
  for (const auto& p : params) {
    const auto key = std::make_pair(p.smoothing_sigma, static_cast<int>(p.connectivity));
    if (!graphs.contains(key)) graphs.emplace(key, build_pixel_graph(image, p.smoothing_sigma, p.connectivity));
  }

  LayeredSaliency out;
  const std::size_t n = params.size();
  out.layers.resize(n);
  out.scores.resize(n);
  out.maps.resize(n);
  if (options.keep_descriptors) out.descriptors.resize(n);
  parallel_for(n, threads, [&](std::size_t l) {
    const auto& p = params[l];
    const auto& graph = graphs.at({p.smoothing_sigma, static_cast<int>(p.connectivity)});
    out.layers[l] = segment_graph(graph, p.k, p.min_region_size);
    auto descriptors = describe_regions(planes, out.layers[l], background, options.sigma_s);
    out.scores[l] = score_regions(model, descriptors);
    out.maps[l] = layer_map(out.layers[l], out.scores[l]);
    if (options.keep_descriptors) out.descriptors[l] = std::move(descriptors);
  });
  return out;
}

LayeredSaliency predict_layers(const ForestModel& model, const Image& image, const PipelineOptions& options) {
  const auto params = options.schedule.params_for(image.width(), image.height());
  return predict_layers(model, image, options, params);
}

std::size_t single_layer_index(std::size_t layers) { return layers / 2; }

FusionWeights fit_fusion(const ForestModel& model, std::span<const AnnotatedImage> corpus,
                         const PipelineOptions& options) {
  FusionFitter fitter(static_cast<std::size_t>(options.schedule.layers));
  for (const auto& item : corpus) {
    item.validate();
    fitter.add(predict_layers(model, item.image, options).maps, item.mask);
  }
  return fitter.solve();
}

FusionWeights fusion_weights_for(const DrfiModel& model, FusionMode mode, std::size_t layers) {
  if (mode == FusionMode::kLearned && !model.fusion.empty()) {
    if (model.fusion.size() != layers) {
      throw InvalidInput("model carries " + std::to_string(model.fusion.size()) + " fusion weights but " +
                         std::to_string(layers) + " layers are configured");
    }
    return model.fusion;
  }
  return average_weights(layers);
}

SaliencyMap predict_saliency(const DrfiModel& model, const Image& image, const PipelineOptions& options,
                             FusionMode mode, bool single_layer) {
  auto params = options.schedule.params_for(image.width(), image.height());
  if (single_layer) {
    const SegParams mid = params[single_layer_index(params.size())];
    const std::vector<SegParams> one{mid};
    auto result = predict_layers(model.forest, image, options, one);
    SaliencyMap map = std::move(result.maps.front());
    normalize_min_max(map);
    return map;
  }
  const auto result = predict_layers(model.forest, image, options, params);
  return fuse(result.maps, fusion_weights_for(model, mode, result.maps.size()));
}

}  // namespace drfi
