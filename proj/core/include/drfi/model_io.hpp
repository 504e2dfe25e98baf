#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "drfi/forest.hpp"
#include "drfi/fusion.hpp"

namespace drfi {

/// Leading bytes of every model file.
inline constexpr std::string_view kModelMagic = "DRFI1";

/// What a model file holds: the regressor and, optionally, learned fusion
/// weights (empty means average the layers).
struct DrfiModel {
  ForestModel forest;
  FusionWeights fusion;
};

/// Layout, all little-endian: magic "DRFI1"; forest (u32 dims, u32 trees,
/// u32 m, u32 leaf_min, u64 seed, u8 flags, f64[dims] importance, u32 tree
/// count, per tree u32 node count and nodes {i32 feature, f64 threshold,
/// i32 left, i32 right, f64 value, u32 count}); u32 fusion weight count, f64 weights.
void write_model(std::ostream& out, const DrfiModel& model);
/// Throws DataError on a bad magic header or truncated/corrupt content.
DrfiModel read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const DrfiModel& model);
DrfiModel load_model(const std::filesystem::path& path);

}  // namespace drfi
