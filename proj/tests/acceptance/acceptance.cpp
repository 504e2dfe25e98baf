// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   drfi_acceptance [--only N]... [--seeds K]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "drfi/config.hpp"
#include "drfi/error.hpp"
#include "drfi/evaluation.hpp"
#include "drfi/forest.hpp"
#include "drfi/fusion.hpp"
#include "drfi/model_io.hpp"
#include "drfi/pipeline.hpp"
#include "drfi/random.hpp"
#include "drfi/regional_descriptors.hpp"
#include "drfi/synthetic.hpp"
#include "drfi/trainset.hpp"
#include "oracles.hpp"

namespace {

using namespace drfi;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

// ------------------------------------------------------------------ 1

constexpr int kCases = 200;
constexpr double kRel = 1e-6;

bool near(double got, double want) { return oracle::close(got, want, kRel, 1e-12); }

struct OracleCase {
  PixelPlanes planes;
  Segmentation seg;
  std::vector<oracle::RegionVector> vectors;
};

OracleCase small_case(Rng& rng) {
  OracleCase c;
  const int w = 2 + static_cast<int>(rng.below(63));
  const int h = 2 + static_cast<int>(rng.below(63));
  c.planes = compute_planes(oracle::random_image(rng, w, h));
  c.seg = make_segmentation(w, h, oracle::random_voronoi(rng, w, h, 1 + static_cast<int>(rng.below(10))));
  c.vectors = oracle::region_vectors(c.planes, c.seg.labels, c.seg.region_count);
  return c;
}

// Each property returns the number of mismatching cases.
int check_chi_square(Rng& rng) {
  int bad = 0;
  for (int t = 0; t < kCases; ++t) {
    const std::size_t n = 1 + rng.below(256);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.below(4) == 0 ? 0.0 : rng.uniform();
      b[i] = rng.below(4) == 0 ? 0.0 : rng.uniform();
    }
    const double got = chi_square(a, b);
    bad += !(near(got, oracle::chi_square(a, b)) && got == chi_square(b, a));
  }
  return bad;
}

int check_contrast(Rng& rng) {
  int bad = 0;
  for (int t = 0; t < kCases; ++t) {
    const auto c = small_case(rng);
    const double sigma = rng.below(4) == 0 ? 1.0 : rng.uniform(0.05, 3.0);
    const auto stats = region_stats(c.planes, c.seg);
    const auto all = regional_contrast_all(stats, sigma);
    bool ok = true;
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const auto single = regional_contrast(i, stats, sigma);
      const auto want = oracle::contrast(i, c.vectors, sigma);
      for (std::size_t k = 0; k < kDifferenceChannels; ++k) ok = ok && near(single[k], want[k]) && near(all[i][k], want[k]);
    }
    bad += !ok;
  }
  return bad;
}

int check_backgroundness(Rng& rng) {
  int bad = 0;
  for (int t = 0; t < kCases; ++t) {
    const auto c = small_case(rng);
    const int w = c.seg.width;
    const int h = c.seg.height;
    const int bw = 1 + static_cast<int>(rng.below(20));
    const bool degenerate = w <= 2 * bw || h <= 2 * bw;
    std::vector<int> border(static_cast<std::size_t>(w * h));
    bool interior = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const bool in = degenerate || x < bw || y < bw || x >= w - bw || y >= h - bw;
        border[static_cast<std::size_t>(y * w + x)] = in ? 0 : 1;
        interior = interior || !in;
      }
    }
    const auto bvec = oracle::region_vectors(c.planes, border, interior ? 2 : 1)[0];
    const auto bg = pseudo_background(c.planes, bw);
    const auto stats = region_stats(c.planes, c.seg);
    bool ok = bg.pixel_count == border_pixel_count(w, h, bw);
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const auto got = regional_backgroundness(stats[i], bg);
      const auto want = oracle::differences(c.vectors[i], bvec);
      for (std::size_t k = 0; k < kDifferenceChannels; ++k) ok = ok && near(got[k], want[k]);
    }
    bad += !ok;
  }
  return bad;
}

int check_properties(Rng& rng) {
  int bad = 0;
  for (int t = 0; t < kCases; ++t) {
    const auto c = small_case(rng);
    const auto stats = region_stats(c.planes, c.seg);
    bool ok = true;
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const auto got = regional_property(i, stats, c.seg);
      const auto want = oracle::property(i, c.vectors, c.seg.labels, c.seg.width, c.seg.height);
      for (std::size_t k = 0; k < kPropertyDims; ++k) ok = ok && near(got[k], want[k]);
    }
    bad += !ok;
  }
  return bad;
}

int check_gain(Rng& rng) {
  int bad = 0;
  for (int t = 0; t < kCases; ++t) {
    // Gain of a random partition.
    const std::size_t n = 2 + rng.below(99);
    std::vector<double> labels(n);
    for (auto& a : labels) a = static_cast<double>(rng.below(2));
    const std::size_t cut = 1 + rng.below(n - 1);
    const std::vector<double> l(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(cut));
    const std::vector<double> r(labels.begin() + static_cast<std::ptrdiff_t>(cut), labels.end());
    bool ok = near(split_gain(l, r), oracle::sse_gain(l, r));

    // The root split of a test-mode stump attains the exhaustive maximum.
    const std::size_t dims = 1 + rng.below(5);
    TrainingSet d{.dims = dims, .features = {}, .labels = {}};
    std::vector<double> x(dims);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : x) v = static_cast<double>(rng.below(16));
      d.append(x, labels[i]);
    }
    const auto model = train_forest(d, {.trees = 1, .features_per_node = static_cast<int>(dims),
                                        .leaf_min = static_cast<int>(n), .seed = 1, .bootstrap = false,
                                        .feature_sampling = false});
    const auto& root = model.trees()[0].nodes()[0];
    double best = 0.0;
    for (std::size_t f = 0; f < dims; ++f) {
      for (int tau2 = 1; tau2 < 31; tau2 += 2) {
        std::vector<double> ll, rr;
        for (std::size_t i = 0; i < n; ++i) (d.row(i)[f] < tau2 / 2.0 ? ll : rr).push_back(labels[i]);
        if (!ll.empty() && !rr.empty()) best = std::max(best, oracle::sse_gain(ll, rr));
      }
    }
    if (root.is_leaf()) {
      ok = ok && best < 1e-12;
    } else {
      std::vector<double> ll, rr;
      for (std::size_t i = 0; i < n; ++i) {
        (d.row(i)[static_cast<std::size_t>(root.feature)] < root.threshold ? ll : rr).push_back(labels[i]);
      }
      ok = ok && near(oracle::sse_gain(ll, rr), best);
    }
    bad += !ok;
  }
  return bad;
}

int check_fusion(Rng& rng) {
  int bad = 0;
  for (int t = 0; t < kCases; ++t) {
    const std::size_t m = 1 + rng.below(10);
    const std::size_t images = 1 + rng.below(3);
    const int w = 2 + static_cast<int>(rng.below(20));
    const int h = 2 + static_cast<int>(rng.below(20));
    std::vector<std::vector<SaliencyMap>> layers(images);
    std::vector<Mask> masks;
    std::vector<Plane<double>> truths;
    for (std::size_t i = 0; i < images; ++i) {
      Mask mk(w, h);
      Plane<double> tr(w, h);
      for (std::size_t p = 0; p < mk.size(); ++p) tr[p] = mk[p] = static_cast<std::uint8_t>(rng.below(2));
      for (std::size_t l = 0; l < m; ++l) {
        SaliencyMap a(w, h);
        for (auto& v : a) v = rng.uniform();
        layers[i].push_back(std::move(a));
      }
      masks.push_back(std::move(mk));
      truths.push_back(std::move(tr));
    }
    const auto got = learn_weights(layers, masks);
    const auto want = oracle::stacked_least_squares(layers, truths);
    // Compare the fitted values: they are unique even when the weights are not.
    bool ok = true;
    for (std::size_t i = 0; i < images && ok; ++i) {
      const auto a = fuse_raw(layers[i], got);
      const auto b = fuse_raw(layers[i], want);
      for (std::size_t p = 0; p < a.size(); ++p) ok = ok && std::abs(a[p] - b[p]) <= 1e-6 * std::max(1.0, std::abs(b[p]));
    }
    const bool full_rank = static_cast<std::size_t>(w * h) * images >= 4 * m;
    if (full_rank) {
      for (std::size_t l = 0; l < m; ++l) ok = ok && oracle::close(got[l], want[l], kRel, 1e-9);
    }
    bad += !ok;
  }
  return bad;
}

int check_metrics(Rng& rng) {
  int bad = 0;
  for (int t = 0; t < kCases; ++t) {
    const int w = 2 + static_cast<int>(rng.below(63));
    const int h = 1 + static_cast<int>(rng.below(64));
    GrayMap map(w, h);
    Mask mask(w, h);
    const int levels = 2 + static_cast<int>(rng.below(255));
    for (std::size_t i = 0; i < map.size(); ++i) {
      mask[i] = static_cast<std::uint8_t>(rng.below(2));
      const double s = std::min(0.999, 0.7 * rng.uniform() + (mask[i] ? 0.3 * rng.uniform() : 0.0));
      map[i] = static_cast<std::uint8_t>(static_cast<int>(s * levels) * 255 / (levels - 1) % 256);
    }
    mask[0] = 1;
    mask[1] = 0;
    const std::vector<int> v(map.begin(), map.end());
    const std::vector<int> l(mask.begin(), mask.end());
    const auto curves = evaluate(map, mask);
    bool ok = near(curves.auc, oracle::mann_whitney_auc(v, l));
    for (int th = 0; th < kThresholdCount; ++th) {
      const auto c = oracle::counts_at(v, l, th);
      const auto& p = curves.points[static_cast<std::size_t>(th)];
      const double pos = static_cast<double>(c.tp + c.fn);
      const double neg = static_cast<double>(c.fp + c.tn);
      ok = ok && near(p.recall, static_cast<double>(c.tp) / pos) && near(p.tpr, static_cast<double>(c.tp) / pos) &&
           near(p.fpr, static_cast<double>(c.fp) / neg);
      if (c.tp + c.fp > 0) {
        ok = ok && near(p.precision, static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp));
      } else {
        ok = ok && std::isnan(p.precision);
      }
    }
    bad += !ok;
  }
  return bad;
}

Outcome criterion_oracles() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<std::string, std::function<int(Rng&)>>> props{
      {"chi-square", check_chi_square},     {"contrast", check_contrast}, {"backgroundness", check_backgroundness},
      {"properties", check_properties},     {"split gain", check_gain},   {"fusion weights", check_fusion},
      {"PR/ROC/AUC", check_metrics}};
  Outcome out;
  std::ostringstream detail;
  std::uint64_t stream = 0;
  for (const auto& [name, fn] : props) {
    Rng rng(20240601, ++stream);
    const int bad = fn(rng);
    if (bad > 0) {
      out.pass = false;
      detail << name << " " << bad << "/" << kCases << " mismatches; ";
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 120.0) out.pass = false;
  detail << props.size() << " properties x " << kCases << " cases, " << fmt(secs, 1) << " s (limit 120 s)";
  out.detail = detail.str();
  return out;
}

// ------------------------------------------------------------------ 2

Outcome criterion_forest() {
  Outcome out;
  std::ostringstream detail;

  TrainingSet toy{.dims = 1, .features = {}, .labels = {}};
  for (int i = 0; i < 10; ++i) toy.append(std::vector<double>{0.0}, 0.0);
  for (int i = 0; i < 10; ++i) toy.append(std::vector<double>{1.0}, 1.0);
  const auto stump = train_forest(toy, {.trees = 1, .features_per_node = 1, .leaf_min = 5, .seed = 1,
                                        .bootstrap = false, .feature_sampling = false});
  int errors = 0;
  for (std::size_t i = 0; i < toy.size(); ++i) errors += stump.predict(toy.row(i)) != toy.labels[i];
  detail << "toy training errors " << errors;
  out.pass = errors == 0;

  Rng rng(7);
  TrainingSet one{.dims = 93, .features = {}, .labels = {}};
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(93, 0.0);
    for (std::size_t f = 0; f < 93; ++f) x[f] = static_cast<double>(f % 5);
    x[7] = rng.uniform();
    one.append(x, x[7] > 0.35 ? 1.0 : 0.0);
  }
  const auto imp = train_forest(one, {.trees = 50, .seed = 11}).feature_importance()[7];
  detail << "; informative-feature importance " << fmt(imp, 6);
  out.pass = out.pass && imp > 0.99;

  // Realistic-size problem: 93 noisy features, several informative.
  TrainingSet noisy{.dims = 93, .features = {}, .labels = {}};
  for (int i = 0; i < 3000; ++i) {
    std::vector<double> x(93);
    for (auto& v : x) v = rng.normal();
    noisy.append(x, x[3] + 0.5 * x[40] - 0.7 * x[90] + 0.5 * rng.normal() > 0 ? 1.0 : 0.0);
  }
  const ForestParams p{.trees = 32, .seed = 1234};
  const auto serial = train_forest(noisy, p, 1);
  const bool same_serial = serial == train_forest(noisy, p, 1);
  const bool same_parallel = serial == train_forest(noisy, p, 4);
  detail << "; same-seed repeat identical " << (same_serial ? "yes" : "no") << ", 4-thread identical "
         << (same_parallel ? "yes" : "no");
  out.pass = out.pass && same_serial && same_parallel;
  out.detail = detail.str();
  return out;
}

// --------------------------------------------------------------- 3, 4

constexpr std::size_t kCorpus = 200;
constexpr std::size_t kTrain = 150;

struct SeedRun {
  std::uint64_t seed = 0;
  DrfiModel model;
  SampleReport report;
  std::size_t samples = 0;
  double fused_auc = 0;
  double single_auc = 0;
  double learned_auc = 0;
  double best_contrast_auc = 0;
  std::string best_contrast;
  double best_background_auc = 0;
  std::string best_background;
  double center_auc = 0;
  double train_seconds = 0;
  double total_seconds = 0;
};

SaliencyMap center_prior(int w, int h) {
  SaliencyMap m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = (x + 0.5) / w - 0.5;
      const double dy = (y + 0.5) / h - 0.5;
      m(x, y) = 1.0 - std::sqrt(dx * dx + dy * dy) / std::sqrt(0.5);
    }
  }
  normalize_min_max(m);
  return m;
}

double pooled(const std::vector<ConfusionTally>& t) { return aggregate(t).pooled.auc; }

SeedRun run_seed(std::uint64_t seed) {
  const auto t0 = Clock::now();
  SeedRun run;
  run.seed = seed;
  const Config config;  // published defaults: M_t = 48, M = 15, T = 200, m = 15
  const auto corpus = synthesize_corpus(kCorpus, 1000 + seed);
  const std::span<const AnnotatedImage> train(corpus.data(), kTrain);
  const std::span<const AnnotatedImage> test(corpus.data() + kTrain, kCorpus - kTrain);

  const auto frag = build_training_set(train, config.sample_config(), 1);
  run.report = frag.report;
  run.samples = frag.samples.size();
  auto params = config.forest_params();
  params.seed = seed;
  run.model.forest = train_forest(frag.samples, params, 1);
  run.train_seconds = seconds_since(t0);

  PipelineOptions opt = config.pipeline_options();
  opt.threads = 1;
  opt.keep_descriptors = true;
  const auto weights = average_weights(static_cast<std::size_t>(opt.schedule.layers));

  std::vector<ConfusionTally> fused, single, center;
  std::vector<std::vector<ConfusionTally>> channel(2 * kDifferenceChannels);
  std::vector<std::vector<SaliencyMap>> test_layers;
  for (const auto& item : test) {
    const auto layered = predict_layers(run.model.forest, item.image, opt);
    fused.push_back(tally(quantize(fuse(layered.maps, weights)), item.mask));
    single.push_back(
        tally(quantize(predict_saliency(run.model, item.image, opt, FusionMode::kAverage, true)), item.mask));
    center.push_back(tally(quantize(center_prior(item.image.width(), item.image.height())), item.mask));
    for (std::size_t k = 0; k < channel.size(); ++k) {
      std::vector<SaliencyMap> maps;
      for (std::size_t l = 0; l < layered.layers.size(); ++l) {
        std::vector<double> score;
        for (const auto& d : layered.descriptors[l]) score.push_back(d[kContrastOffset + k]);
        maps.push_back(layer_map(layered.layers[l], score));
      }
      channel[k].push_back(tally(quantize(fuse(maps, weights)), item.mask));
    }
    test_layers.push_back(layered.maps);
  }
  run.fused_auc = pooled(fused);
  run.single_auc = pooled(single);
  run.center_auc = pooled(center);
  const auto& names = descriptor_names();
  for (std::size_t k = 0; k < channel.size(); ++k) {
    const double auc = pooled(channel[k]);
    auto& best = k < kDifferenceChannels ? run.best_contrast_auc : run.best_background_auc;
    auto& best_name = k < kDifferenceChannels ? run.best_contrast : run.best_background;
    if (auc > best) {
      best = auc;
      best_name = names[k];
    }
  }
  run.total_seconds = seconds_since(t0);

  // Learned fusion on the training images, reported for reference only.
  run.model.fusion = fit_fusion(run.model.forest, train, opt);
  std::vector<ConfusionTally> learned;
  for (std::size_t i = 0; i < test.size(); ++i) {
    learned.push_back(tally(quantize(fuse(test_layers[i], run.model.fusion)), test[i].mask));
  }
  run.learned_auc = pooled(learned);
  return run;
}

void print_run(const SeedRun& r) {
  std::cout << "  seed " << r.seed << ": samples " << r.samples << " (" << r.report.positives << "+/"
            << r.report.negatives << "-, " << fmt(100 * r.report.discard_fraction(), 1) << "% unconfident), fused "
            << fmt(r.fused_auc) << ", single-layer " << fmt(r.single_auc) << ", learned-fusion " << fmt(r.learned_auc)
            << ", best contrast " << r.best_contrast << " " << fmt(r.best_contrast_auc) << ", best backgroundness "
            << r.best_background << " " << fmt(r.best_background_auc) << ", center prior " << fmt(r.center_auc)
            << "; train " << fmt(r.train_seconds, 1) << " s, total " << fmt(r.total_seconds, 1) << " s\n";
}

Outcome criterion_end_task(const SeedRun& r) {
  Outcome out;
  const double margin = 0.03;
  out.pass = r.fused_auc >= 0.90 && r.fused_auc >= r.best_contrast_auc + margin &&
             r.fused_auc >= r.best_background_auc + margin && r.fused_auc >= r.center_auc + margin &&
             r.total_seconds < 900.0;
  out.detail = "pooled AUC " + fmt(r.fused_auc) + " (>= 0.90); margins over contrast " + r.best_contrast + " " +
               fmt(r.fused_auc - r.best_contrast_auc) + ", backgroundness " + r.best_background + " " +
               fmt(r.fused_auc - r.best_background_auc) + ", center prior " + fmt(r.fused_auc - r.center_auc) +
               " (each >= 0.03); " + fmt(r.total_seconds, 1) + " s single-threaded (limit 900 s)";
  return out;
}

Outcome criterion_multilayer(const std::vector<SeedRun>& runs) {
  Outcome out;
  std::vector<double> diffs;
  for (const auto& r : runs) diffs.push_back(r.fused_auc - r.single_auc);
  std::vector<double> sorted = diffs;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                          : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  out.pass = diffs.front() >= -0.005 && median >= 0.0;
  std::ostringstream d;
  d << "fused - single-layer AUC: first corpus " << fmt(diffs.front()) << " (>= -0.005); per seed";
  for (double v : diffs) d << ' ' << fmt(v);
  d << "; median " << fmt(median) << " over " << runs.size() << " seeds (>= 0)";
  out.detail = d.str();
  return out;
}

// ------------------------------------------------------------------ 5

Outcome criterion_metrics() {
  Mask mask(32, 24, 0);
  for (int y = 6; y < 18; ++y) {
    for (int x = 8; x < 20; ++x) mask(x, y) = 1;
  }
  GrayMap perfect(32, 24), inverted(32, 24);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    perfect[i] = mask[i] ? 255 : 0;
    inverted[i] = mask[i] ? 0 : 255;
  }
  const double p = evaluate(perfect, mask).auc;
  const double i = evaluate(inverted, mask).auc;
  bool constant_ok = true;
  for (int v : {0, 1, 128, 255}) constant_ok = constant_ok && evaluate(GrayMap(32, 24, static_cast<std::uint8_t>(v)), mask).auc == 0.5;
  Outcome out;
  out.pass = p == 1.0 && i == 0.0 && constant_ok;
  out.detail = "perfect " + fmt(p, 17) + ", constant " + (constant_ok ? "0.5 exactly" : "not 0.5") + ", inverted " +
               fmt(i, 17);
  return out;
}

// ------------------------------------------------------------------ 6

Outcome criterion_persistence(const DrfiModel& model) {
  Outcome out;
  std::ostringstream buffer(std::ios::binary);
  write_model(buffer, model);
  const std::string bytes = buffer.str();
  std::istringstream in(bytes, std::ios::binary);
  const auto back = read_model(in);

  Rng rng(6);
  int differing = 0;
  std::vector<double> x(model.forest.dims());
  for (int k = 0; k < 1000; ++k) {
    for (auto& v : x) v = rng.below(4) == 0 ? rng.uniform(0, 0.05) : rng.uniform(0, 2);
    const double a = model.forest.predict(x);
    const double b = back.forest.predict(x);
    differing += std::memcmp(&a, &b, sizeof a) != 0;
  }
  const bool weights_same = back.fusion == model.fusion;

  int rejected = 0;
  for (std::size_t pos = 0; pos < kModelMagic.size(); ++pos) {
    std::string broken = bytes;
    broken[pos] = static_cast<char>(broken[pos] ^ 0x5a);
    std::istringstream bad(broken, std::ios::binary);
    try {
      (void)read_model(bad);
    } catch (const DataError&) {
      ++rejected;
    }
  }
  out.pass = differing == 0 && weights_same && rejected == static_cast<int>(kModelMagic.size());
  out.detail = std::to_string(1000 - differing) + "/1000 predictions bit-identical after reload (" +
               std::to_string(model.forest.trees().size()) + " trees, " + std::to_string(bytes.size()) +
               " bytes); corrupted magic rejected with a data error " + std::to_string(rejected) + "/" +
               std::to_string(kModelMagic.size());
  return out;
}

// ------------------------------------------------------------------ 7

double time_predict(const DrfiModel& model, const Image& image, int threads, int repeats) {
  PipelineOptions opt;
  opt.threads = threads;
  std::vector<double> t;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    const auto map = predict_saliency(model, image, opt);
    t.push_back(seconds_since(t0));
    if (map.width() != image.width()) throw InvariantViolation("prediction changed the image size");
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

Outcome criterion_performance(const DrfiModel& model) {
  const auto image = synthesize(99, 0, {.width = 400, .height = 300}).image;
  const double t1 = time_predict(model, image, 1, 3);
  const double t4 = time_predict(model, image, 4, 3);
  const double speedup = t1 / t4;
  Outcome out;
  out.pass = t1 <= 5.0 && speedup >= 2.0;
  out.detail = "400x300, M=15: " + fmt(t1, 3) + " s single-threaded (limit 5 s); 4 threads " + fmt(t4, 3) +
               " s, speedup " + fmt(speedup, 2) + "x (need >= 2x); hardware threads available: " +
               std::to_string(std::thread::hardware_concurrency());
  return out;
}

// ------------------------------------------------------------------ report

void importance_composition(const ForestModel& forest) {
  const auto& imp = forest.feature_importance();
  std::vector<std::size_t> order(imp.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
  int counts[3] = {0, 0, 0};
  for (std::size_t r = 0; r < 60 && r < order.size(); ++r) {
    counts[order[r] < kBackgroundnessOffset ? 0 : order[r] < kPropertyOffset ? 1 : 2]++;
  }
  std::cout << "INFO top-60 importance composition: contrast " << counts[0] << ", backgroundness " << counts[1]
            << ", property " << counts[2] << "\n";
}

void report(int id, const std::string& name, const Outcome& o, bool& all) {
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail << std::endl;
  all = all && o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  int seeds = 5;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only.insert(std::stoi(argv[++i]));
    } else if (a == "--seeds" && i + 1 < argc) {
      seeds = std::max(1, std::stoi(argv[++i]));
    } else {
      std::cerr << "usage: drfi_acceptance [--only N]... [--seeds K]\n";
      return 1;
    }
  }
  auto want = [&](int id) { return only.empty() || only.count(id) > 0; };

  bool all = true;
  try {
    if (want(1)) report(1, "oracle equivalence", criterion_oracles(), all);
    if (want(2)) report(2, "forest correctness", criterion_forest(), all);

    std::vector<SeedRun> runs;
    const bool need_runs = want(3) || want(4) || want(6) || want(7);
    const int run_count = want(4) ? seeds : 1;
    for (int s = 0; need_runs && s < run_count; ++s) {
      runs.push_back(run_seed(static_cast<std::uint64_t>(s + 1)));
      print_run(runs.back());
    }
    if (!runs.empty()) importance_composition(runs.front().model.forest);
    if (want(3)) report(3, "end-task synthetic corpus", criterion_end_task(runs.front()), all);
    if (want(4)) report(4, "multi-layer gain", criterion_multilayer(runs), all);
    if (want(5)) report(5, "analytic metric cases", criterion_metrics(), all);
    if (want(6)) report(6, "persistence", criterion_persistence(runs.front().model), all);
    if (want(7)) report(7, "performance envelope", criterion_performance(runs.front().model), all);
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  return all ? 0 : 1;
}
