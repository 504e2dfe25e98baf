#include "drfi/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "drfi/error.hpp"
#include "drfi/image_io.hpp"

namespace drfi {
namespace {

bool is_raster(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  static const std::vector<std::string> kExtensions{".png", ".jpg", ".jpeg", ".bmp", ".ppm", ".pgm", ".pnm", ".tif", ".tiff"};
  return std::find(kExtensions.begin(), kExtensions.end(), ext) != kExtensions.end();
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::filesystem::path>> list_rasters(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw DataError("not a directory: " + dir.string());
  std::map<std::string, std::filesystem::path> by_stem;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !is_raster(entry.path())) continue;
    const auto stem = entry.path().stem().string();
    auto [it, inserted] = by_stem.emplace(stem, entry.path());
    // Several files with one stem: keep the lexicographically first name.
    if (!inserted && entry.path().filename() < it->second.filename()) it->second = entry.path();
  }
  return {by_stem.begin(), by_stem.end()};
}

std::vector<DatasetEntry> match_dataset(const std::filesystem::path& image_dir, const std::filesystem::path& mask_dir,
                                        const std::optional<std::filesystem::path>& manifest,
                                        const std::optional<std::string>& split) {
  const auto images = list_rasters(image_dir);
  const auto masks = list_rasters(mask_dir);
  const std::map<std::string, std::filesystem::path> image_map(images.begin(), images.end());
  const std::map<std::string, std::filesystem::path> mask_map(masks.begin(), masks.end());

  std::vector<std::string> stems;
  if (manifest) {
    std::ifstream in(*manifest);
    if (!in) throw DataError("cannot read manifest " + manifest->string());
    std::string line;
    while (std::getline(in, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream fields(line);
      std::string stem;
      std::string tag;
      if (!(fields >> stem)) continue;
      fields >> tag;
      if (split && tag != *split) continue;
      stems.push_back(stem);
    }
  } else {
    for (const auto& [stem, path] : images) stems.push_back(stem);
  }

  std::vector<DatasetEntry> out;
  std::vector<std::string> missing;
  for (const auto& stem : stems) {
    const auto img = image_map.find(stem);
    const auto msk = mask_map.find(stem);
    if (img == image_map.end() || msk == mask_map.end()) {
      missing.push_back(stem + (img == image_map.end() ? " (no image)" : " (no mask)"));
      continue;
    }
    out.push_back({stem, img->second, msk->second});
  }
  if (!missing.empty()) throw DataError("unmatched dataset entries: " + join(missing));
  return out;
}

AnnotatedImage load_annotated(const DatasetEntry& entry) {
  AnnotatedImage item;
  item.name = entry.stem;
  item.image = read_image(entry.image);
  item.mask = read_mask(entry.mask);
  if (!item.mask.same_shape(item.image)) {
    throw DataError(entry.mask.string() + ": mask size differs from " + entry.image.string());
  }
  return item;
}

StemPairing pair_by_stem(const std::filesystem::path& left, const std::filesystem::path& right) {
  const auto a = list_rasters(left);
  const auto b = list_rasters(right);
  const std::map<std::string, std::filesystem::path> bm(b.begin(), b.end());
  StemPairing out;
  for (const auto& [stem, path] : a) {
    const auto it = bm.find(stem);
    if (it == bm.end()) {
      out.only_left.push_back(stem);
    } else {
      out.pairs.emplace_back(path, it->second);
    }
  }
  const std::map<std::string, std::filesystem::path> am(a.begin(), a.end());
  for (const auto& [stem, path] : b) {
    if (!am.contains(stem)) out.only_right.push_back(stem);
  }
  return out;
}

}  // namespace drfi
