#include "drfi/regional_descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <utility>

#include "drfi/error.hpp"

namespace drfi {
namespace {

// Stats of every label in [0, count); pixels labelled -1 belong to no set.
std::vector<RegionStats> compute_stats(const PixelPlanes& planes, std::span<const int> labels, int count) {
  const int w = planes.width;
  const int h = planes.height;
  const std::size_t total = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);

  // Group pixel indices by label, raster order within each group.
  std::vector<std::size_t> start(static_cast<std::size_t>(count) + 1, 0);
  for (const int l : labels) {
    if (l >= 0) ++start[static_cast<std::size_t>(l) + 1];
  }
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::size_t> order(start.back());
  {
    auto cursor = start;
    for (std::size_t i = 0; i < total; ++i) {
      if (labels[i] >= 0) order[cursor[static_cast<std::size_t>(labels[i])]++] = i;
    }
  }

  auto color = [&](std::size_t c, std::size_t i) -> double {
    if (c < 3) return planes.rgb[c][i];
    if (c < 6) return planes.hsv[c - 3][i];
    return planes.lab[c - 6][i];
  };

  std::vector<RegionStats> out(static_cast<std::size_t>(count));
  std::vector<int> xs;
  for (std::size_t r = 0; r < out.size(); ++r) {
    const std::span<const std::size_t> pixels(order.data() + start[r], start[r + 1] - start[r]);
    RegionStats& s = out[r];
    const std::size_t n = pixels.size();
    if (n == 0) throw InvalidInput("region " + std::to_string(r) + " has no pixels");
    const double inv_n = 1.0 / static_cast<double>(n);
    s.pixel_count = n;
    s.alpha = static_cast<double>(n) / static_cast<double>(total);
    s.rgb_hist.assign(kColorHistBins, 0.0);
    s.hsv_hist.assign(kColorHistBins, 0.0);
    s.lab_hist.assign(kColorHistBins, 0.0);
    s.argmax_hist.assign(kFilterChannels, 0.0);
    s.lbp_hist.assign(kLbpCodes, 0.0);
    s.bbox = {w, h, -1, -1};

    double sx = 0.0;
    double sy = 0.0;
    double lbp_sum = 0.0;
    xs.clear();
    // Sums are shifted by the first pixel so uniform regions get exact means and zero variance.
    std::array<double, 9> color_ref{};
    std::array<double, kFilterChannels> filter_ref{};
    for (std::size_t c = 0; c < 9; ++c) color_ref[c] = color(c, pixels[0]);
    for (std::size_t f = 0; f < kFilterChannels; ++f) filter_ref[f] = planes.filter_abs[f][pixels[0]];
    for (const std::size_t i : pixels) {
      const int x = static_cast<int>(i % static_cast<std::size_t>(w));
      const int y = static_cast<int>(i / static_cast<std::size_t>(w));
      sx += x;
      sy += y;
      xs.push_back(x);
      s.bbox.min_x = std::min(s.bbox.min_x, x);
      s.bbox.max_x = std::max(s.bbox.max_x, x);
      s.bbox.min_y = std::min(s.bbox.min_y, y);
      s.bbox.max_y = std::max(s.bbox.max_y, y);

      const int l = labels[i];
      const bool boundary = x == 0 || y == 0 || x == w - 1 || y == h - 1 || labels[i - 1] != l ||
                            labels[i + 1] != l || labels[i - static_cast<std::size_t>(w)] != l ||
                            labels[i + static_cast<std::size_t>(w)] != l;
      if (boundary) ++s.perimeter;

      for (std::size_t c = 0; c < 9; ++c) s.color_mean[c] += color(c, i) - color_ref[c];
      for (std::size_t f = 0; f < kFilterChannels; ++f) s.filter_mean[f] += planes.filter_abs[f][i] - filter_ref[f];
      lbp_sum += planes.lbp[i];

      s.rgb_hist[static_cast<std::size_t>(joint_bin({planes.rgb[0][i], planes.rgb[1][i], planes.rgb[2][i]}, kRgbBins))] += 1.0;
      s.hsv_hist[static_cast<std::size_t>(joint_bin({planes.hsv[0][i], planes.hsv[1][i], planes.hsv[2][i]}, kHsvBins))] += 1.0;
      s.lab_hist[static_cast<std::size_t>(joint_bin({planes.lab[0][i], planes.lab[1][i], planes.lab[2][i]}, kLabBins))] += 1.0;
      s.argmax_hist[planes.filter_argmax[i]] += 1.0;
      s.lbp_hist[planes.lbp[i]] += 1.0;
    }
    for (std::size_t c = 0; c < 9; ++c) s.color_mean[c] = color_ref[c] + s.color_mean[c] * inv_n;
    for (std::size_t f = 0; f < kFilterChannels; ++f) s.filter_mean[f] = filter_ref[f] + s.filter_mean[f] * inv_n;
    const double lbp_mean = lbp_sum * inv_n;
    for (auto* hist : {&s.rgb_hist, &s.hsv_hist, &s.lab_hist, &s.argmax_hist, &s.lbp_hist}) {
      for (auto& v : *hist) v *= inv_n;
    }

    // Second pass for population variances.
    for (const std::size_t i : pixels) {
      for (std::size_t c = 0; c < 9; ++c) {
        const double d = color(c, i) - s.color_mean[c];
        s.color_var[c] += d * d;
      }
      for (std::size_t f = 0; f < kFilterChannels; ++f) {
        const double d = planes.filter_abs[f][i] - s.filter_mean[f];
        s.filter_var[f] += d * d;
      }
      const double d = planes.lbp[i] - lbp_mean;
      s.lbp_var += d * d;
    }
    for (auto& v : s.color_var) v *= inv_n;
    for (auto& v : s.filter_var) v *= inv_n;
    s.lbp_var *= inv_n;

    // Pixel-center coordinates normalized by the image size.
    const double nw = static_cast<double>(w);
    const double nh = static_cast<double>(h);
    s.position = {(sx * inv_n + 0.5) / nw, (sy * inv_n + 0.5) / nh};
    const auto rank_index = [n](double p) {
      const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
      return std::clamp<std::size_t>(rank, 1, n) - 1;
    };
    const std::size_t i10 = rank_index(0.1);
    const std::size_t i90 = rank_index(0.9);
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(i10), xs.end());
    const int x10 = xs[i10];
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(i90), xs.end());
    const int x90 = xs[i90];
    // Raster order keeps y sorted.
    const auto y_at = [&](std::size_t k) { return static_cast<int>(pixels[k] / static_cast<std::size_t>(w)); };
    s.percentile10 = {(x10 + 0.5) / nw, (y_at(i10) + 0.5) / nh};
    s.percentile90 = {(x90 + 0.5) / nw, (y_at(i90) + 0.5) / nh};
  }
  return out;
}

struct SparseHist {
  std::vector<std::pair<std::uint32_t, double>> entries;
};

SparseHist sparsify(const std::vector<double>& h) {
  SparseHist s;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] != 0.0) s.entries.emplace_back(static_cast<std::uint32_t>(i), h[i]);
  }
  return s;
}

// Same terms as chi_square() restricted to the union of both supports.
double sparse_chi_square(const SparseHist& a, const std::vector<double>& a_dense, const SparseHist& b,
                         const std::vector<double>& b_dense) {
  double sum = 0.0;
  for (const auto& [bin, va] : a.entries) {
    const double vb = b_dense[bin];
    const double d = va - vb;
    sum += 2.0 * d * d / (va + vb);
  }
  for (const auto& [bin, vb] : b.entries) {
    if (a_dense[bin] == 0.0) sum += 2.0 * vb;
  }
  return sum;
}

// Writes the 29 channels in column order given the five histogram distances.
void fill_mean_channels(DifferenceVector& d, const RegionStats& a, const RegionStats& b) {
  for (std::size_t c = 0; c < 3; ++c) {
    d[c] = std::abs(a.color_mean[c] - b.color_mean[c]);                // c1-c3 RGB
    d[4 + c] = std::abs(a.color_mean[3 + c] - b.color_mean[3 + c]);    // c5-c7 HSV
    d[8 + c] = std::abs(a.color_mean[6 + c] - b.color_mean[6 + c]);    // c9-c11 Lab
  }
  for (std::size_t f = 0; f < kFilterChannels; ++f) {
    d[12 + f] = std::abs(a.filter_mean[f] - b.filter_mean[f]);         // c13-c27
  }
}

}  // namespace

std::vector<RegionStats> region_stats(const PixelPlanes& planes, const Segmentation& seg) {
  if (planes.width != seg.width || planes.height != seg.height) {
    throw InvalidInput("region_stats: planes are " + std::to_string(planes.width) + "x" +
                       std::to_string(planes.height) + " but segmentation is " + std::to_string(seg.width) + "x" +
                       std::to_string(seg.height));
  }
  return compute_stats(planes, seg.labels, seg.region_count);
}

std::size_t border_pixel_count(int width, int height, int border_width) {
  const auto total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (width <= 2 * border_width || height <= 2 * border_width) return total;
  return total - static_cast<std::size_t>(width - 2 * border_width) * static_cast<std::size_t>(height - 2 * border_width);
}

RegionStats pseudo_background(const PixelPlanes& planes, int border_width) {
  if (border_width < 1) throw InvalidInput("border width must be >= 1");
  const int w = planes.width;
  const int h = planes.height;
  const bool degenerate = w <= 2 * border_width || h <= 2 * border_width;
  std::vector<int> labels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool border = degenerate || x < border_width || y < border_width || x >= w - border_width ||
                          y >= h - border_width;
      if (border) labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = 0;
    }
  }
  return std::move(compute_stats(planes, labels, 1).front());
}

DifferenceVector channel_differences(const RegionStats& a, const RegionStats& b) {
  DifferenceVector d{};
  fill_mean_channels(d, a, b);
  d[3] = chi_square(a.rgb_hist, b.rgb_hist);
  d[7] = chi_square(a.hsv_hist, b.hsv_hist);
  d[11] = chi_square(a.lab_hist, b.lab_hist);
  d[27] = chi_square(a.argmax_hist, b.argmax_hist);
  d[28] = chi_square(a.lbp_hist, b.lbp_hist);
  return d;
}

DifferenceVector regional_contrast(std::size_t i, std::span<const RegionStats> stats, double sigma_s) {
  DifferenceVector out{};
  const auto& ri = stats[i];
  const double denom = 2.0 * sigma_s * sigma_s;
  for (const auto& rj : stats) {
    const double dx = ri.position[0] - rj.position[0];
    const double dy = ri.position[1] - rj.position[1];
    const double weight = rj.alpha * std::exp(-(dx * dx + dy * dy) / denom);
    const auto d = channel_differences(ri, rj);
    for (std::size_t k = 0; k < kDifferenceChannels; ++k) out[k] += weight * d[k];
  }
  return out;
}

std::vector<DifferenceVector> regional_contrast_all(std::span<const RegionStats> stats, double sigma_s) {
  const std::size_t n = stats.size();
  std::vector<DifferenceVector> out(n, DifferenceVector{});
  std::vector<std::array<SparseHist, 5>> sparse(n);
  for (std::size_t i = 0; i < n; ++i) {
    sparse[i] = {sparsify(stats[i].rgb_hist), sparsify(stats[i].hsv_hist), sparsify(stats[i].lab_hist),
                 sparsify(stats[i].argmax_hist), sparsify(stats[i].lbp_hist)};
  }
  static constexpr std::array<std::size_t, 5> kHistChannel{3, 7, 11, 27, 28};
  const auto dense = [](const RegionStats& s, std::size_t h) -> const std::vector<double>& {
    switch (h) {
      case 0: return s.rgb_hist;
      case 1: return s.hsv_hist;
      case 2: return s.lab_hist;
      case 3: return s.argmax_hist;
      default: return s.lbp_hist;
    }
  };

  const double denom = 2.0 * sigma_s * sigma_s;
  DifferenceVector d{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = stats[i];
      const auto& b = stats[j];
      fill_mean_channels(d, a, b);
      for (std::size_t hidx = 0; hidx < 5; ++hidx) {
        d[kHistChannel[hidx]] = sparse_chi_square(sparse[i][hidx], dense(a, hidx), sparse[j][hidx], dense(b, hidx));
      }
      const double dx = a.position[0] - b.position[0];
      const double dy = a.position[1] - b.position[1];
      const double spatial = std::exp(-(dx * dx + dy * dy) / denom);
      const double wi = b.alpha * spatial;
      const double wj = a.alpha * spatial;
      for (std::size_t k = 0; k < kDifferenceChannels; ++k) {
        out[i][k] += wi * d[k];
        out[j][k] += wj * d[k];
      }
    }
  }
  return out;
}

DifferenceVector regional_backgroundness(const RegionStats& region, const RegionStats& background) {
  return channel_differences(region, background);
}

namespace {

PropertyVector property_from(const RegionStats& s, double neighbor_area, int width, int height) {
  PropertyVector p{};
  p[0] = s.position[0];
  p[1] = s.position[1];
  p[2] = s.percentile10[0];
  p[3] = s.percentile10[1];
  p[4] = s.percentile90[0];
  p[5] = s.percentile90[1];
  p[6] = static_cast<double>(s.perimeter) / (2.0 * (width + height));
  p[7] = static_cast<double>(s.bbox.width()) / static_cast<double>(s.bbox.height());
  for (std::size_t c = 0; c < 3; ++c) {
    p[8 + c] = s.color_var[c];       // RGB
    p[11 + c] = s.color_var[6 + c];  // L*a*b*
    p[14 + c] = s.color_var[3 + c];  // HSV
  }
  for (std::size_t f = 0; f < kFilterChannels; ++f) p[17 + f] = s.filter_var[f];
  p[32] = s.lbp_var;
  p[33] = s.alpha;
  p[34] = neighbor_area;
  return p;
}

}  // namespace

PropertyVector regional_property(std::size_t i, std::span<const RegionStats> stats, const Segmentation& seg) {
  double neighbor_area = 0.0;
  for (const auto& [a, b] : seg.adjacency) {
    if (static_cast<std::size_t>(a) == i) neighbor_area += stats[static_cast<std::size_t>(b)].alpha;
    if (static_cast<std::size_t>(b) == i) neighbor_area += stats[static_cast<std::size_t>(a)].alpha;
  }
  return property_from(stats[i], neighbor_area, seg.width, seg.height);
}

std::vector<Descriptor> describe_regions(const PixelPlanes& planes, const Segmentation& seg,
                                         const RegionStats& background, double sigma_s) {
  if (!(sigma_s > 0.0)) throw InvalidInput("sigma_s must be positive");
  const auto stats = region_stats(planes, seg);
  const auto contrast = regional_contrast_all(stats, sigma_s);

  std::vector<double> neighbor_area(stats.size(), 0.0);
  for (const auto& [a, b] : seg.adjacency) {
    neighbor_area[static_cast<std::size_t>(a)] += stats[static_cast<std::size_t>(b)].alpha;
    neighbor_area[static_cast<std::size_t>(b)] += stats[static_cast<std::size_t>(a)].alpha;
  }

  std::vector<Descriptor> out(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto bg = regional_backgroundness(stats[i], background);
    const auto prop = property_from(stats[i], neighbor_area[i], seg.width, seg.height);
    auto it = std::copy(contrast[i].begin(), contrast[i].end(), out[i].begin());
    it = std::copy(bg.begin(), bg.end(), it);
    std::copy(prop.begin(), prop.end(), it);
  }
  return out;
}

std::vector<Descriptor> describe_regions(const PixelPlanes& planes, const Segmentation& seg, double sigma_s,
                                         int border_width) {
  return describe_regions(planes, seg, pseudo_background(planes, border_width), sigma_s);
}

const std::array<std::string, kDescriptorDims>& descriptor_names() {
  static const auto names = [] {
    std::array<std::string, kDescriptorDims> n;
    for (std::size_t k = 0; k < kDifferenceChannels; ++k) {
      n[kContrastOffset + k] = "c" + std::to_string(k + 1);
      n[kBackgroundnessOffset + k] = "b" + std::to_string(k + 1);
    }
    for (std::size_t k = 0; k < kPropertyDims; ++k) n[kPropertyOffset + k] = "p" + std::to_string(k + 1);
    return n;
  }();
  return names;
}

void write_descriptor_table(std::ostream& out, std::span<const Descriptor> descriptors) {
  out << "region";
  for (const auto& name : descriptor_names()) out << ',' << name;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t r = 0; r < descriptors.size(); ++r) {
    out << r;
    for (const double v : descriptors[r]) out << ',' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace drfi
