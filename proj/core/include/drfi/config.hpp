#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "drfi/forest.hpp"
#include "drfi/pipeline.hpp"
#include "drfi/segmentation.hpp"
#include "drfi/trainset.hpp"

namespace drfi {

/// Every tunable of the toolkit. Defaults reproduce the published settings.
/// Stored as a flat `key = value` text file; '#' starts a comment.
struct Config {
  // Segmentation schedules
  int train_layers = 48;
  int test_layers = 15;
  double k_min = 50.0;
  double k_max = 1200.0;
  double min_region_fraction = 0.0002;
  int min_region_floor = 10;
  double smoothing_sigma = 0.8;
  int connectivity = 4;

  // Descriptors and training samples
  double sigma_s = 1.0;
  int border_width = 15;
  double purity = 0.8;
  double discard_ratio = 0.6;

  // Forest
  int trees = 200;
  int features_per_node = 15;
  int leaf_min = 5;
  std::uint64_t seed = 1;

  FusionMode fusion = FusionMode::kAverage;
  int threads = 1;

  // Paths
  std::string image_dir;
  std::string mask_dir;
  std::string manifest;
  std::string model;
  std::string output_dir;

  /// Sets one key from its text form. Throws UsageError on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  /// Throws UsageError naming the first out-of-range field.
  void validate() const;

  SegSchedule train_schedule() const;
  SegSchedule test_schedule() const;
  SampleConfig sample_config() const;
  ForestParams forest_params() const;
  PipelineOptions pipeline_options() const;

  bool operator==(const Config&) const = default;
};

/// All recognized keys, in file order.
const std::vector<std::string>& config_keys();

Config parse_config(std::string_view text);
std::string format_config(const Config& config);
Config load_config(const std::filesystem::path& path);

std::string_view to_string(FusionMode mode);
FusionMode parse_fusion_mode(std::string_view text);

}  // namespace drfi
