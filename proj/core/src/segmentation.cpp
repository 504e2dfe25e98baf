#include "drfi/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "drfi/error.hpp"
#include "drfi/parallel.hpp"

namespace drfi {
namespace {

// Disjoint-set forest with union by rank and path compression.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    int root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const int next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  int join(int a, int b) {
    if (rank_[a] > rank_[b]) {
      parent_[b] = a;
      size_[a] += size_[b];
      return a;
    }
    parent_[a] = b;
    size_[b] += size_[a];
    if (rank_[a] == rank_[b]) ++rank_[b];
    return b;
  }

  int size(int x) const { return size_[x]; }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
  std::vector<int> size_;
};

std::vector<double> gaussian_taps(double sigma) {
  const int radius = static_cast<int>(std::ceil(sigma * 4.0)) + 1;
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i / sigma) * (i / sigma));
    taps[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

// Separable blur with clamp-to-edge borders.
Plane<double> blur(const Plane<double>& src, double sigma) {
  if (sigma <= 0.0) return src;
  const auto taps = gaussian_taps(sigma);
  const int radius = static_cast<int>(taps.size() / 2);
  const int w = src.width();
  const int h = src.height();
  Plane<double> tmp(w, h);
  Plane<double> out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += taps[static_cast<std::size_t>(i + radius)] * src(std::clamp(x + i, 0, w - 1), y);
      }
      tmp(x, y) = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += taps[static_cast<std::size_t>(i + radius)] * tmp(x, std::clamp(y + i, 0, h - 1));
      }
      out(x, y) = acc;
    }
  }
  return out;
}

}  // namespace

void SegParams::validate() const {
  if (!(k > 0.0)) throw InvalidInput("segmentation k must be positive, got " + std::to_string(k));
  if (min_region_size < 1) {
    throw InvalidInput("min_region_size must be >= 1, got " + std::to_string(min_region_size));
  }
}

std::vector<std::vector<int>> Segmentation::neighbors() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(region_count));
  for (const auto& [a, b] : adjacency) {
    out[static_cast<std::size_t>(a)].push_back(b);
    out[static_cast<std::size_t>(b)].push_back(a);
  }
  return out;
}

PixelGraph build_pixel_graph(const Image& image, double smoothing_sigma, Connectivity connectivity) {
  if (image.empty()) throw InvalidInput("cannot segment an empty image");
  const int w = image.width();
  const int h = image.height();

  std::array<Plane<double>, 3> channels{Plane<double>(w, h), Plane<double>(w, h), Plane<double>(w, h)};
  for (std::size_t i = 0; i < image.size(); ++i) {
    channels[0][i] = image[i].r;
    channels[1][i] = image[i].g;
    channels[2][i] = image[i].b;
  }
  for (auto& c : channels) c = blur(c, smoothing_sigma);

  auto dist = [&](int x1, int y1, int x2, int y2) {
    double s = 0.0;
    for (const auto& c : channels) {
      const double d = c(x1, y1) - c(x2, y2);
      s += d * d;
    }
    return std::sqrt(s);
  };

  PixelGraph graph;
  graph.width = w;
  graph.height = h;
  graph.edges.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                      (connectivity == Connectivity::kEight ? 4 : 2));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int p = y * w + x;
      if (x + 1 < w) graph.edges.push_back({dist(x, y, x + 1, y), p, p + 1});
      if (y + 1 < h) graph.edges.push_back({dist(x, y, x, y + 1), p, p + w});
      if (connectivity == Connectivity::kEight) {
        if (x + 1 < w && y + 1 < h) graph.edges.push_back({dist(x, y, x + 1, y + 1), p, p + w + 1});
        if (x + 1 < w && y > 0) graph.edges.push_back({dist(x, y, x + 1, y - 1), p, p - w + 1});
      }
    }
  }
  // Stable sort: equal weights keep construction order.
  std::stable_sort(graph.edges.begin(), graph.edges.end(),
                   [](const PixelGraph::Edge& l, const PixelGraph::Edge& r) { return l.weight < r.weight; });
  return graph;
}

Segmentation segment_graph(const PixelGraph& graph, double k, int min_region_size) {
  const std::size_t n = static_cast<std::size_t>(graph.width) * static_cast<std::size_t>(graph.height);
  DisjointSets sets(n);
  std::vector<double> threshold(n, k);

  for (const auto& e : graph.edges) {
    int a = sets.find(e.a);
    int b = sets.find(e.b);
    if (a == b) continue;
    if (e.weight <= threshold[static_cast<std::size_t>(a)] && e.weight <= threshold[static_cast<std::size_t>(b)]) {
      const int root = sets.join(a, b);
      threshold[static_cast<std::size_t>(root)] = e.weight + k / sets.size(root);
    }
  }
  for (const auto& e : graph.edges) {
    const int a = sets.find(e.a);
    const int b = sets.find(e.b);
    if (a != b && (sets.size(a) < min_region_size || sets.size(b) < min_region_size)) sets.join(a, b);
  }

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = sets.find(static_cast<int>(i));
  return make_segmentation(graph.width, graph.height, std::move(labels));
}

Segmentation make_segmentation(int width, int height, std::vector<int> labels) {
  Segmentation seg;
  seg.width = width;
  seg.height = height;

  std::vector<int> remap;
  for (auto& l : labels) {
    if (static_cast<std::size_t>(l) >= remap.size()) remap.resize(static_cast<std::size_t>(l) + 1, -1);
    auto& slot = remap[static_cast<std::size_t>(l)];
    if (slot < 0) slot = seg.region_count++;
    l = slot;
  }
  seg.labels = std::move(labels);
  seg.region_areas.assign(static_cast<std::size_t>(seg.region_count), 0);
  for (const int l : seg.labels) ++seg.region_areas[static_cast<std::size_t>(l)];

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int l = seg.label(x, y);
      if (x + 1 < width) {
        const int r = seg.label(x + 1, y);
        if (r != l) seg.adjacency.emplace_back(std::min(l, r), std::max(l, r));
      }
      if (y + 1 < height) {
        const int d = seg.label(x, y + 1);
        if (d != l) seg.adjacency.emplace_back(std::min(l, d), std::max(l, d));
      }
    }
  }
  std::sort(seg.adjacency.begin(), seg.adjacency.end());
  seg.adjacency.erase(std::unique(seg.adjacency.begin(), seg.adjacency.end()), seg.adjacency.end());
  return seg;
}

Segmentation segment(const Image& image, const SegParams& params) {
  params.validate();
  return segment_graph(build_pixel_graph(image, params.smoothing_sigma, params.connectivity), params.k,
                       params.min_region_size);
}

std::vector<Segmentation> multilevel_segment(const Image& image, const std::vector<SegParams>& params,
                                             int threads) {
  if (params.empty()) throw InvalidInput("multilevel segmentation needs at least one parameter set");
  if (image.empty()) throw InvalidInput("cannot segment an empty image");
  for (const auto& p : params) p.validate();

  // Distinct (sigma, connectivity) pairs each get one graph.
  std::map<std::pair<double, int>, std::size_t> graph_index;
  std::vector<std::pair<double, Connectivity>> graph_keys;
  std::vector<std::size_t> layer_graph(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto key = std::make_pair(params[i].smoothing_sigma, static_cast<int>(params[i].connectivity));
    auto [it, inserted] = graph_index.emplace(key, graph_keys.size());
    if (inserted) graph_keys.emplace_back(params[i].smoothing_sigma, params[i].connectivity);
    layer_graph[i] = it->second;
  }
  std::vector<PixelGraph> graphs(graph_keys.size());
  parallel_for(graphs.size(), threads, [&](std::size_t g) {
    graphs[g] = build_pixel_graph(image, graph_keys[g].first, graph_keys[g].second);
  });

  std::vector<Segmentation> out(params.size());
  parallel_for(params.size(), threads, [&](std::size_t i) {
    out[i] = segment_graph(graphs[layer_graph[i]], params[i].k, params[i].min_region_size);
  });
  return out;
}

void validate(const Segmentation& seg) {
  const auto n = static_cast<std::size_t>(seg.width) * static_cast<std::size_t>(seg.height);
  if (seg.labels.size() != n) throw InvariantViolation("segmentation label count does not match dimensions");
  if (seg.region_areas.size() != static_cast<std::size_t>(seg.region_count)) {
    throw InvariantViolation("region_areas size differs from region_count");
  }
  std::vector<std::size_t> areas(static_cast<std::size_t>(seg.region_count), 0);
  for (const int l : seg.labels) {
    if (l < 0 || l >= seg.region_count) throw InvariantViolation("label outside [0, region_count)");
    ++areas[static_cast<std::size_t>(l)];
  }
  if (areas != seg.region_areas) throw InvariantViolation("region_areas inconsistent with labels");
  for (const auto a : areas) {
    if (a == 0) throw InvariantViolation("labels are not compact");
  }
  for (const auto& [a, b] : seg.adjacency) {
    if (a >= b) throw InvariantViolation("adjacency pair not ordered or is a self pair");
  }
}

std::vector<SegParams> SegSchedule::params_for(int width, int height) const {
  if (layers < 1) throw InvalidInput("schedule needs at least one layer");
  if (!(k_min > 0.0) || !(k_max >= k_min)) throw InvalidInput("schedule needs 0 < k_min <= k_max");
  const double pixels = static_cast<double>(width) * static_cast<double>(height);
  const int min_size = std::max(min_region_floor, static_cast<int>(std::floor(pixels * min_region_fraction)));

  std::vector<SegParams> out;
  out.reserve(static_cast<std::size_t>(layers));
  for (int i = 0; i < layers; ++i) {
    const double t = layers == 1 ? 0.5 : static_cast<double>(i) / (layers - 1);
    SegParams p;
    p.smoothing_sigma = smoothing_sigma;
    p.k = k_min * std::pow(k_max / k_min, t);
    p.min_region_size = std::max(1, min_size);
    p.connectivity = connectivity;
    out.push_back(p);
  }
  return out;
}

Image visualize(const Segmentation& seg, const Image& image) {
  std::vector<std::array<double, 3>> sums(static_cast<std::size_t>(seg.region_count), {0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < seg.labels.size(); ++i) {
    auto& s = sums[static_cast<std::size_t>(seg.labels[i])];
    s[0] += image[i].r;
    s[1] += image[i].g;
    s[2] += image[i].b;
  }
  Image out(seg.width, seg.height);
  for (std::size_t i = 0; i < seg.labels.size(); ++i) {
    const auto l = static_cast<std::size_t>(seg.labels[i]);
    const double area = static_cast<double>(seg.region_areas[l]);
    out[i] = Rgb{static_cast<std::uint8_t>(std::lround(sums[l][0] / area)),
                 static_cast<std::uint8_t>(std::lround(sums[l][1] / area)),
                 static_cast<std::uint8_t>(std::lround(sums[l][2] / area))};
  }
  return out;
}

}  // namespace drfi
