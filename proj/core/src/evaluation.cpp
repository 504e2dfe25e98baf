#include "drfi/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "drfi/error.hpp"

namespace drfi {

ConfusionTally& ConfusionTally::operator+=(const ConfusionTally& other) {
  for (int t = 0; t < kThresholdCount; ++t) {
    tp[static_cast<std::size_t>(t)] += other.tp[static_cast<std::size_t>(t)];
    fp[static_cast<std::size_t>(t)] += other.fp[static_cast<std::size_t>(t)];
  }
  positives += other.positives;
  negatives += other.negatives;
  return *this;
}

GrayMap quantize(const SaliencyMap& map) {
  GrayMap out(map.width(), map.height());
  for (std::size_t i = 0; i < map.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(map[i], 0.0, 1.0)));
  }
  return out;
}

ConfusionTally tally(const GrayMap& map, const Mask& mask) {
  if (!map.same_shape(mask)) {
    throw InvalidInput("map is " + std::to_string(map.width()) + "x" + std::to_string(map.height()) +
                       " but mask is " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()));
  }
  std::array<std::uint64_t, 256> pos_hist{};
  std::array<std::uint64_t, 256> neg_hist{};
  for (std::size_t i = 0; i < map.size(); ++i) {
    (mask[i] != 0 ? pos_hist : neg_hist)[map[i]] += 1;
  }
  ConfusionTally out;
  // Cumulative from the top: tp[t] counts positives with value >= t; tp[256] = 0.
  for (int t = 255; t >= 0; --t) {
    const auto ut = static_cast<std::size_t>(t);
    out.tp[ut] = out.tp[ut + 1] + pos_hist[ut];
    out.fp[ut] = out.fp[ut + 1] + neg_hist[ut];
  }
  out.positives = out.tp[0];
  out.negatives = out.fp[0];
  return out;
}

EvalCurves curves(const ConfusionTally& counts) {
  if (counts.positives == 0 || counts.negatives == 0) {
    throw InvalidInput("ROC is undefined: the ground truth needs both salient and background pixels");
  }
  const double p = static_cast<double>(counts.positives);
  const double n = static_cast<double>(counts.negatives);
  EvalCurves out;
  out.points.reserve(kThresholdCount);
  for (int t = 0; t < kThresholdCount; ++t) {
    ThresholdPoint pt;
    pt.threshold = t;
    pt.tp = counts.tp[static_cast<std::size_t>(t)];
    pt.fp = counts.fp[static_cast<std::size_t>(t)];
    const auto predicted = pt.tp + pt.fp;
    pt.precision = predicted > 0 ? static_cast<double>(pt.tp) / static_cast<double>(predicted)
                                 : std::numeric_limits<double>::quiet_NaN();
    pt.recall = static_cast<double>(pt.tp) / p;
    pt.tpr = pt.recall;
    pt.fpr = static_cast<double>(pt.fp) / n;
    out.points.push_back(pt);
    if (predicted > 0) out.pr.push_back({pt.recall, pt.precision});
    out.roc.push_back({pt.fpr, pt.tpr});
  }
  std::sort(out.roc.begin(), out.roc.end(),
            [](const RocPoint& a, const RocPoint& b) { return a.fpr < b.fpr || (a.fpr == b.fpr && a.tpr < b.tpr); });
  out.roc.erase(std::unique(out.roc.begin(), out.roc.end()), out.roc.end());
  for (std::size_t i = 1; i < out.roc.size(); ++i) {
    out.auc += (out.roc[i].fpr - out.roc[i - 1].fpr) * (out.roc[i].tpr + out.roc[i - 1].tpr) * 0.5;
  }
  return out;
}

EvalCurves evaluate(const GrayMap& map, const Mask& mask) { return curves(tally(map, mask)); }

DatasetEval aggregate(std::span<const ConfusionTally> tallies) {
  if (tallies.empty()) throw InvalidInput("cannot aggregate an empty result list");
  DatasetEval out;
  ConfusionTally pooled;
  double auc_sum = 0.0;
  for (const auto& t : tallies) {
    pooled += t;
    if (t.positives > 0 && t.negatives > 0) {
      auc_sum += curves(t).auc;
      ++out.images_in_mean;
    }
  }
  out.images = tallies.size();
  out.pooled = curves(pooled);
  out.mean_auc = out.images_in_mean > 0 ? auc_sum / static_cast<double>(out.images_in_mean)
                                        : std::numeric_limits<double>::quiet_NaN();
  return out;
}

void write_curve_table(std::ostream& out, const EvalCurves& curves) {
  out << "threshold\tprecision\trecall\tfpr\ttpr\n";
  const auto old_precision = out.precision(10);
  for (const auto& pt : curves.points) {
    out << pt.threshold << '\t';
    if (std::isnan(pt.precision)) {
      out << "nan";
    } else {
      out << pt.precision;
    }
    out << '\t' << pt.recall << '\t' << pt.fpr << '\t' << pt.tpr << '\n';
  }
  out.precision(old_precision);
}

}  // namespace drfi
