#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "drfi/trainset.hpp"

namespace drfi {

struct DatasetEntry {
  std::string stem;
  std::filesystem::path image;
  std::filesystem::path mask;
};

/// Raster files in `dir` keyed by file stem, sorted by stem.
std::vector<std::pair<std::string, std::filesystem::path>> list_rasters(const std::filesystem::path& dir);

/// Images and masks matched by stem. A manifest lists one stem per line with
/// an optional split tag ("train", "test", ...); when given, only listed
/// stems are used, filtered by `split` if that is set. Throws DataError
/// listing every stem lacking an image or a mask.
std::vector<DatasetEntry> match_dataset(const std::filesystem::path& image_dir, const std::filesystem::path& mask_dir,
                                        const std::optional<std::filesystem::path>& manifest = std::nullopt,
                                        const std::optional<std::string>& split = std::nullopt);

AnnotatedImage load_annotated(const DatasetEntry& entry);

struct StemPairing {
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> pairs;
  std::vector<std::string> only_left;
  std::vector<std::string> only_right;
};

/// Pairs raster files of two directories by stem.
StemPairing pair_by_stem(const std::filesystem::path& left, const std::filesystem::path& right);

}  // namespace drfi
