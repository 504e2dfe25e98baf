// Stage timings on synthetic 400x300 scenes. Run with --benchmark_filter to pick a stage.

#include <benchmark/benchmark.h>

#include "drfi/forest.hpp"
#include "drfi/pipeline.hpp"
#include "drfi/pixel_features.hpp"
#include "drfi/random.hpp"
#include "drfi/regional_descriptors.hpp"
#include "drfi/segmentation.hpp"
#include "drfi/synthetic.hpp"

namespace {

using namespace drfi;

const Image& scene() {
  static const Image image = synthesize(99, 0, {.width = 400, .height = 300}).image;
  return image;
}

TrainingSet random_samples(std::size_t n) {
  Rng rng(3);
  TrainingSet d{.dims = kDescriptorDims, .features = {}, .labels = {}};
  std::vector<double> x(kDescriptorDims);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = rng.normal();
    d.append(x, x[0] + 0.5 * x[60] + 0.3 * rng.normal() > 0 ? 1.0 : 0.0);
  }
  return d;
}

const ForestModel& bench_forest() {
  static const ForestModel model = train_forest(random_samples(4000), {.trees = 200, .seed = 1});
  return model;
}

void BM_Segment(benchmark::State& state) {
  const SegParams params{.k = static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(segment(scene(), params).region_count);
}
BENCHMARK(BM_Segment)->Arg(50)->Arg(300)->Arg(1200)->Unit(benchmark::kMillisecond);

void BM_MultilevelSegment(benchmark::State& state) {
  const auto params = SegSchedule{}.params_for(400, 300);
  for (auto _ : state) benchmark::DoNotOptimize(multilevel_segment(scene(), params, 1).size());
}
BENCHMARK(BM_MultilevelSegment)->Unit(benchmark::kMillisecond);

void BM_ComputePlanes(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(compute_planes(scene(), static_cast<int>(state.range(0))).lbp.size());
}
BENCHMARK(BM_ComputePlanes)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_DescribeRegions(benchmark::State& state) {
  const auto planes = compute_planes(scene());
  const auto seg = segment(scene(), {.k = static_cast<double>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(describe_regions(planes, seg, 1.0, 15).size());
  state.counters["regions"] = seg.region_count;
}
BENCHMARK(BM_DescribeRegions)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_ForestTrain(benchmark::State& state) {
  const auto data = random_samples(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(data, {.trees = 20, .seed = 1}).dims());
}
BENCHMARK(BM_ForestTrain)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ForestPredict(benchmark::State& state) {
  const auto data = random_samples(1000);
  const auto& model = bench_forest();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict(data.row(i)));
    i = (i + 1) % data.size();
  }
}
BENCHMARK(BM_ForestPredict);

void BM_PredictSaliency(benchmark::State& state) {
  const DrfiModel model{bench_forest(), {}};
  PipelineOptions opt;
  opt.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(predict_saliency(model, scene(), opt).size());
}
BENCHMARK(BM_PredictSaliency)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
