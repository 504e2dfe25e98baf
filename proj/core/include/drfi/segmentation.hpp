#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "drfi/image.hpp"

namespace drfi {

enum class Connectivity { kFour = 4, kEight = 8 };

/// Parameters of the graph-based merging segmentation.
struct SegParams {
  double smoothing_sigma = 0.8;  ///< Gaussian pre-blur in pixels, <= 0 disables it
  double k = 300.0;              ///< granularity constant, larger k gives larger regions
  int min_region_size = 10;      ///< pixels
  Connectivity connectivity = Connectivity::kFour;

  /// Throws InvalidInput unless k > 0 and min_region_size >= 1.
  void validate() const;
};

/// One layer of regions. labels are compact: every value lies in [0, region_count).
struct Segmentation {
  int width = 0;
  int height = 0;
  std::vector<int> labels;
  int region_count = 0;
  std::vector<std::size_t> region_areas;
  /// Neighboring region pairs (a, b) with a < b, sorted, 4-connected.
  std::vector<std::pair<int, int>> adjacency;

  int label(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  /// Neighbor lists derived from `adjacency`.
  std::vector<std::vector<int>> neighbors() const;
};

/// Weighted pixel graph with edges sorted by (weight, construction index).
/// Independent of k, so one graph serves every layer sharing sigma and connectivity.
struct PixelGraph {
  struct Edge {
    double weight;
    int a;
    int b;
  };
  int width = 0;
  int height = 0;
  std::vector<Edge> edges;
};

PixelGraph build_pixel_graph(const Image& image, double smoothing_sigma, Connectivity connectivity);

/// Runs the merging predicate and small-region cleanup on a prepared graph.
Segmentation segment_graph(const PixelGraph& graph, double k, int min_region_size);

/// Graph-based segmentation of an image. Throws InvalidInput on an empty image
/// or invalid parameters.
Segmentation segment(const Image& image, const SegParams& params);

/// One segmentation per parameter set, in input order. Layers sharing blur
/// and connectivity reuse one sorted edge list; layers run on up to `threads` workers.
std::vector<Segmentation> multilevel_segment(const Image& image, const std::vector<SegParams>& params,
                                             int threads = 1);

/// Relabels so labels appear in raster order of first occurrence and fills
/// areas and adjacency. `labels` may hold arbitrary non-negative ids.
Segmentation make_segmentation(int width, int height, std::vector<int> labels);

/// Checks every structural invariant; throws InvariantViolation on failure.
void validate(const Segmentation& seg);

/// Layer schedule settings: geometric k values with a size floor proportional to the image area.
struct SegSchedule {
  int layers = 15;
  double k_min = 50.0;
  double k_max = 1200.0;
  double min_region_fraction = 0.0002;
  int min_region_floor = 10;
  double smoothing_sigma = 0.8;
  Connectivity connectivity = Connectivity::kFour;

  std::vector<SegParams> params_for(int width, int height) const;
};

/// Paints each region with its mean color.
Image visualize(const Segmentation& seg, const Image& image);

}  // namespace drfi
