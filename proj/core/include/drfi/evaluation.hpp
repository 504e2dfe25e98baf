#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "drfi/image.hpp"

namespace drfi {

/// Thresholds 0..255 plus the sentinel 256 (empty prediction).
inline constexpr int kThresholdCount = 257;

/// Confusion counts of one map against one mask at every threshold.
/// A pixel is predicted salient at threshold t when its value >= t.
struct ConfusionTally {
  std::array<std::uint64_t, kThresholdCount> tp{};
  std::array<std::uint64_t, kThresholdCount> fp{};
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;

  ConfusionTally& operator+=(const ConfusionTally& other);
};

struct ThresholdPoint {
  int threshold = 0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  double precision = 0.0;  ///< NaN when nothing is predicted salient
  double recall = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct PrPoint {
  double recall;
  double precision;
};

struct RocPoint {
  double fpr;
  double tpr;
  bool operator==(const RocPoint&) const = default;
};

struct EvalCurves {
  std::vector<ThresholdPoint> points;  ///< one per threshold, t ascending
  std::vector<PrPoint> pr;             ///< thresholds with a non-empty prediction
  std::vector<RocPoint> roc;           ///< sorted by (fpr, tpr), duplicates removed
  double auc = 0.0;                    ///< trapezoidal area under roc
};

/// Dataset-level result: curves from pooled counts plus the mean of per-image AUCs.
struct DatasetEval {
  EvalCurves pooled;
  double mean_auc = 0.0;
  std::size_t images = 0;
  std::size_t images_in_mean = 0;  ///< images whose mask has both classes
};

/// round(255 * clamp(s, 0, 1)).
GrayMap quantize(const SaliencyMap& map);

/// Throws InvalidInput on a dimension mismatch.
ConfusionTally tally(const GrayMap& map, const Mask& mask);

/// Throws InvalidInput when the counts lack positives or negatives.
EvalCurves curves(const ConfusionTally& counts);

EvalCurves evaluate(const GrayMap& map, const Mask& mask);

/// Pools counts across images before computing curves. Throws on empty input.
DatasetEval aggregate(std::span<const ConfusionTally> tallies);

/// Columns: threshold precision recall fpr tpr (precision "nan" when undefined).
void write_curve_table(std::ostream& out, const EvalCurves& curves);

}  // namespace drfi
