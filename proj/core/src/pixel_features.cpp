#include "drfi/pixel_features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drfi/error.hpp"
#include "drfi/parallel.hpp"

namespace drfi {
namespace {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

}  // namespace

std::array<double, 3> rgb_to_hsv(const std::array<double, 3>& rgb) {
  const auto [r, g, b] = rgb;
  const double max = std::max({r, g, b});
  const double min = std::min({r, g, b});
  const double delta = max - min;
  double h = 0.0;
  if (delta > 0.0) {
    if (max == r) {
      h = std::fmod((g - b) / delta, 6.0);
    } else if (max == g) {
      h = (b - r) / delta + 2.0;
    } else {
      h = (r - g) / delta + 4.0;
    }
    h /= 6.0;
    if (h < 0.0) h += 1.0;
  }
  const double s = max > 0.0 ? delta / max : 0.0;
  return {h, s, max};
}

std::array<double, 3> rgb_to_lab(const std::array<double, 3>& rgb) {
  const double r = srgb_to_linear(rgb[0]);
  const double g = srgb_to_linear(rgb[1]);
  const double b = srgb_to_linear(rgb[2]);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  // D65 reference white.
  const double fx = lab_f(x / 0.95047);
  const double fy = lab_f(y / 1.0);
  const double fz = lab_f(z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::array<double, 3> normalize_lab(const std::array<double, 3>& lab) {
  return {std::clamp(lab[0] / 100.0, 0.0, 1.0), std::clamp((lab[1] + 128.0) / 255.0, 0.0, 1.0),
          std::clamp((lab[2] + 128.0) / 255.0, 0.0, 1.0)};
}

int joint_bin(const std::array<double, 3>& v, const std::array<int, 3>& bins) {
  int index = 0;
  for (int c = 0; c < 3; ++c) {
    const int b = std::clamp(static_cast<int>(v[static_cast<std::size_t>(c)] * bins[static_cast<std::size_t>(c)]), 0,
                             bins[static_cast<std::size_t>(c)] - 1);
    index = index * bins[static_cast<std::size_t>(c)] + b;
  }
  return index;
}

Plane<double> luminance(const Image& image) {
  Plane<double> gray(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i) {
    gray[i] = (0.299 * image[i].r + 0.587 * image[i].g + 0.114 * image[i].b) / 255.0;
  }
  return gray;
}

std::uint8_t lbp_code(const Plane<double>& gray, int x, int y) {
  static constexpr std::array<std::array<int, 2>, 8> kOffsets{
      {{-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}}};
  const double center = gray(x, y);
  unsigned code = 0;
  for (unsigned i = 0; i < kOffsets.size(); ++i) {
    const int nx = std::clamp(x + kOffsets[i][0], 0, gray.width() - 1);
    const int ny = std::clamp(y + kOffsets[i][1], 0, gray.height() - 1);
    if (gray(nx, ny) >= center) code |= 1u << i;
  }
  return static_cast<std::uint8_t>(code);
}

PixelPlanes compute_planes(const Image& image, int threads) {
  if (image.empty()) throw InvalidInput("cannot compute feature planes of an empty image");
  const int w = image.width();
  const int h = image.height();

  PixelPlanes planes;
  planes.width = w;
  planes.height = h;
  for (int c = 0; c < 3; ++c) {
    planes.rgb[static_cast<std::size_t>(c)] = Plane<double>(w, h);
    planes.hsv[static_cast<std::size_t>(c)] = Plane<double>(w, h);
    planes.lab[static_cast<std::size_t>(c)] = Plane<double>(w, h);
  }
  for (std::size_t i = 0; i < image.size(); ++i) {
    const std::array<double, 3> rgb{image[i].r / 255.0, image[i].g / 255.0, image[i].b / 255.0};
    const auto hsv = rgb_to_hsv(rgb);
    const auto lab = normalize_lab(rgb_to_lab(rgb));
    for (std::size_t c = 0; c < 3; ++c) {
      planes.rgb[c][i] = rgb[c];
      planes.hsv[c][i] = hsv[c];
      planes.lab[c][i] = lab[c];
    }
  }

  const Plane<double> gray = luminance(image);
  const auto& bank = filter_bank();

  // Split the bank into contiguous chunks so each worker owns its FFT workspace.
  const int workers = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(bank.kernels.size())));
  int max_radius = 0;
  for (const auto& kernel : bank.kernels) max_radius = std::max(max_radius, kernel.radius);
  const std::size_t chunk = (bank.kernels.size() + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
  std::vector<std::vector<Plane<double>>> chunk_out(static_cast<std::size_t>(workers));
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t t) {
    const std::size_t begin = std::min(bank.kernels.size(), t * chunk);
    const std::size_t end = std::min(bank.kernels.size(), begin + chunk);
    chunk_out[t] = correlate_all(gray, std::span<const Kernel>(bank.kernels).subspan(begin, end - begin), max_radius);
  });

  for (auto& p : planes.filter_abs) p = Plane<double>(w, h, 0.0);
  std::size_t k = 0;
  for (auto& responses : chunk_out) {
    for (auto& r : responses) {
      auto& dst = planes.filter_abs[static_cast<std::size_t>(bank.channel[k])];
      for (std::size_t i = 0; i < r.size(); ++i) dst[i] = std::max(dst[i], std::abs(r[i]));
      ++k;
    }
  }

  planes.filter_argmax = Plane<std::uint8_t>(w, h);
  planes.lbp = Plane<std::uint8_t>(w, h);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    int best = 0;
    for (int c = 1; c < kFilterChannels; ++c) {
      if (planes.filter_abs[static_cast<std::size_t>(c)][i] > planes.filter_abs[static_cast<std::size_t>(best)][i]) {
        best = c;
      }
    }
    planes.filter_argmax[i] = static_cast<std::uint8_t>(best);
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) planes.lbp(x, y) = lbp_code(gray, x, y);
  }
  return planes;
}

double chi_square(std::span<const double> h1, std::span<const double> h2) {
  if (h1.size() != h2.size()) {
    throw InvalidInput("chi_square: bin counts differ (" + std::to_string(h1.size()) + " vs " +
                       std::to_string(h2.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    const double s = h1[i] + h2[i];
    if (s > 0.0) {
      const double d = h1[i] - h2[i];
      sum += 2.0 * d * d / s;
    }
  }
  return sum;
}

std::vector<double> elementwise_abs_diff(std::span<const double> x1, std::span<const double> x2) {
  if (x1.size() != x2.size()) {
    throw InvalidInput("elementwise_abs_diff: lengths differ (" + std::to_string(x1.size()) + " vs " +
                       std::to_string(x2.size()) + ")");
  }
  std::vector<double> out(x1.size());
  for (std::size_t i = 0; i < x1.size(); ++i) out[i] = std::abs(x1[i] - x2[i]);
  return out;
}

}  // namespace drfi
