#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "drfi/pixel_features.hpp"
#include "drfi/segmentation.hpp"

namespace drfi {

inline constexpr std::size_t kDifferenceChannels = 29;
inline constexpr std::size_t kPropertyDims = 35;
inline constexpr std::size_t kDescriptorDims = 2 * kDifferenceChannels + kPropertyDims;  // 93

/// Offsets of the three blocks inside a descriptor: [c1..c29, b1..b29, p1..p35].
inline constexpr std::size_t kContrastOffset = 0;
inline constexpr std::size_t kBackgroundnessOffset = kDifferenceChannels;
inline constexpr std::size_t kPropertyOffset = 2 * kDifferenceChannels;

using DifferenceVector = std::array<double, kDifferenceChannels>;
using PropertyVector = std::array<double, kPropertyDims>;
using Descriptor = std::array<double, kDescriptorDims>;

struct BoundingBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = 0;
  int max_y = 0;
  int width() const { return max_x - min_x + 1; }
  int height() const { return max_y - min_y + 1; }
};

/// Statistics of one pixel set (a region, or the pseudo-background).
/// Color triplets are ordered RGB, HSV, L*a*b*; every histogram sums to 1.
struct RegionStats {
  std::size_t pixel_count = 0;
  double alpha = 0.0;                       ///< pixel_count / image pixels
  std::array<double, 2> position{};         ///< mean (x, y), normalized to [0,1]
  std::array<double, 2> percentile10{};     ///< nearest-rank 10th percentile of (x, y)
  std::array<double, 2> percentile90{};
  std::array<double, 9> color_mean{};
  std::array<double, 9> color_var{};
  std::array<double, kFilterChannels> filter_mean{};
  std::array<double, kFilterChannels> filter_var{};
  double lbp_var = 0.0;
  std::vector<double> rgb_hist;     // 256
  std::vector<double> hsv_hist;     // 256
  std::vector<double> lab_hist;     // 256
  std::vector<double> argmax_hist;  // 15
  std::vector<double> lbp_hist;     // 256
  BoundingBox bbox;
  std::size_t perimeter = 0;  ///< pixels with a 4-neighbor outside the set or the image
};

/// Stats for every region of `seg`. Throws InvalidInput on a size mismatch.
std::vector<RegionStats> region_stats(const PixelPlanes& planes, const Segmentation& seg);

/// Stats of the pixels within `border_width` of the image edge. Images too
/// small to have an interior use every pixel.
RegionStats pseudo_background(const PixelPlanes& planes, int border_width);

/// Number of pixels pseudo_background() covers.
std::size_t border_pixel_count(int width, int height, int border_width);

/// Per-channel differences D_k: absolute differences for mean channels,
/// chi-square for histogram channels, in contrast/backgroundness column order.
DifferenceVector channel_differences(const RegionStats& a, const RegionStats& b);

/// sum_j alpha_j exp(-|p_i - p_j|^2 / (2 sigma_s^2)) D(v_i, v_j).
DifferenceVector regional_contrast(std::size_t i, std::span<const RegionStats> stats, double sigma_s);

/// Contrast of every region at once; equal to regional_contrast() per region
/// but visits each pair once and uses sparse histogram supports.
std::vector<DifferenceVector> regional_contrast_all(std::span<const RegionStats> stats, double sigma_s);

/// D(v_i, v_B) against the pseudo-background.
DifferenceVector regional_backgroundness(const RegionStats& region, const RegionStats& background);

/// Geometry and appearance descriptor p1..p35 of region i.
PropertyVector regional_property(std::size_t i, std::span<const RegionStats> stats, const Segmentation& seg);

std::vector<Descriptor> describe_regions(const PixelPlanes& planes, const Segmentation& seg,
                                         const RegionStats& background, double sigma_s);
std::vector<Descriptor> describe_regions(const PixelPlanes& planes, const Segmentation& seg, double sigma_s,
                                         int border_width);

/// "c1".."c29", "b1".."b29", "p1".."p35".
const std::array<std::string, kDescriptorDims>& descriptor_names();

/// Text table: header "region,c1,...,p35", one row per descriptor.
void write_descriptor_table(std::ostream& out, std::span<const Descriptor> descriptors);

}  // namespace drfi
