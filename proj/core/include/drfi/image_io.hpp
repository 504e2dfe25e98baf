#pragma once

#include <filesystem>

#include "drfi/image.hpp"

namespace drfi {

/// Decodes any 8-bit raster format OpenCV reads (PNG, JPEG, BMP, PPM, ...).
/// Throws DataError naming the path when decoding fails.
Image read_image(const std::filesystem::path& path);

/// 8-bit single channel; color files are converted to luminance.
GrayMap read_gray(const std::filesystem::path& path);
/// Grayscale ground truth; pixels above 127 are salient.
Mask read_mask(const std::filesystem::path& path);

void write_image(const std::filesystem::path& path, const Image& image);
void write_gray(const std::filesystem::path& path, const GrayMap& map);
/// round(255 * s) per pixel.
void write_saliency(const std::filesystem::path& path, const SaliencyMap& map);

}  // namespace drfi
