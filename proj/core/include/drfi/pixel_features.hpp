#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "drfi/image.hpp"

namespace drfi {

inline constexpr int kFilterChannels = 15;
inline constexpr int kLbpCodes = 256;
inline constexpr int kColorHistBins = 256;

/// Joint histogram bin counts per channel; each product is 256.
inline constexpr std::array<int, 3> kRgbBins{8, 8, 4};
inline constexpr std::array<int, 3> kHsvBins{8, 8, 4};
inline constexpr std::array<int, 3> kLabBins{4, 8, 8};

/// Per-pixel feature planes shared by every layer of one image.
/// Color channels are in [0,1]; L*a*b* is affinely rescaled (see normalize_lab).
struct PixelPlanes {
  int width = 0;
  int height = 0;
  std::array<Plane<double>, 3> rgb;
  std::array<Plane<double>, 3> hsv;
  std::array<Plane<double>, 3> lab;
  std::array<Plane<double>, kFilterChannels> filter_abs;
  Plane<std::uint8_t> filter_argmax;  ///< channel of max |response|, lowest index on ties
  Plane<std::uint8_t> lbp;            ///< 8-neighbor radius-1 code
};

/// RGB in [0,1] to HSV in [0,1] (hue divided by 360 degrees).
std::array<double, 3> rgb_to_hsv(const std::array<double, 3>& rgb);
/// sRGB in [0,1] to CIE L*a*b* under D65; L in [0,100].
std::array<double, 3> rgb_to_lab(const std::array<double, 3>& rgb);
/// Maps L/100 and (a+128)/255, (b+128)/255, clamped to [0,1].
std::array<double, 3> normalize_lab(const std::array<double, 3>& lab);

/// Joint histogram bin of a [0,1]^3 color under per-channel bin counts.
int joint_bin(const std::array<double, 3>& v, const std::array<int, 3>& bins);

/// Luminance in [0,1] (Rec. 601 weights); the input to filters and LBP.
Plane<double> luminance(const Image& image);

/// Square correlation kernel of side 2*radius+1, row-major.
struct Kernel {
  int radius = 0;
  std::vector<double> taps;
  double at(int dx, int dy) const {
    return taps[static_cast<std::size_t>((dy + radius) * (2 * radius + 1) + (dx + radius))];
  }
};

/// The 45 kernels behind the 15 filter channels: edge and bar filters at
/// three scales and six orientations (channels 0-5, orientation-collapsed by
/// max |response|), eight Laplacian-of-Gaussian scales (6-13) and one Gaussian (14).
struct FilterBank {
  std::vector<Kernel> kernels;
  std::vector<int> channel;  ///< output channel of each kernel
};
const FilterBank& filter_bank();

/// Direct correlation with clamp-to-edge padding.
Plane<double> correlate(const Plane<double>& src, const Kernel& kernel);

/// FFT correlation of one source with many kernels; same result as correlate().
/// The padded frame covers at least `pad_radius`; fixing it makes results
/// independent of how a bank is split into calls.
std::vector<Plane<double>> correlate_all(const Plane<double>& src, std::span<const Kernel> kernels,
                                         int pad_radius = 0);

/// LBP code at (x, y): bit i set when neighbor i >= center, neighbors
/// clockwise from the top-left, clamp at borders.
std::uint8_t lbp_code(const Plane<double>& gray, int x, int y);

PixelPlanes compute_planes(const Image& image, int threads = 1);

/// sum_i 2 (h1_i - h2_i)^2 / (h1_i + h2_i), skipping empty bins.
double chi_square(std::span<const double> h1, std::span<const double> h2);

/// (|x1_0 - x2_0|, ..., |x1_d - x2_d|).
std::vector<double> elementwise_abs_diff(std::span<const double> x1, std::span<const double> x2);

}  // namespace drfi
