// drfi: train, apply and evaluate regional saliency models from the command line.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "drfi/config.hpp"
#include "drfi/dataset.hpp"
#include "drfi/error.hpp"
#include "drfi/evaluation.hpp"
#include "drfi/image_io.hpp"
#include "drfi/model_io.hpp"
#include "drfi/pipeline.hpp"
#include "drfi/synthetic.hpp"
#include "drfi/trainset.hpp"

namespace fs = std::filesystem;

namespace {

using namespace drfi;

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct DatasetArgs {
  std::string images;
  std::string masks;
  std::string manifest;
  std::string split;
};

// Defaults, then the config file, then --set pairs, then dedicated flags.
Config resolve_config(const Globals& g) {
  Config c = g.config_path.empty() ? Config{} : load_config(g.config_path);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = *g.threads;
  return c;
}

void add_dataset_options(CLI::App* cmd, DatasetArgs& d) {
  cmd->add_option("--images", d.images, "Directory of input images");
  cmd->add_option("--masks", d.masks, "Directory of binary ground-truth masks (matched by file stem)");
  cmd->add_option("--manifest", d.manifest, "Text file listing 'stem [split]' per line");
  cmd->add_option("--split", d.split, "Only use manifest entries with this split tag");
}

std::vector<DatasetEntry> resolve_dataset(const DatasetArgs& d, const Config& c) {
  const std::string images = d.images.empty() ? c.image_dir : d.images;
  const std::string masks = d.masks.empty() ? c.mask_dir : d.masks;
  const std::string manifest = d.manifest.empty() ? c.manifest : d.manifest;
  if (images.empty() || masks.empty()) throw UsageError("--images and --masks are required (or image_dir/mask_dir)");
  const auto entries =
      match_dataset(images, masks, manifest.empty() ? std::nullopt : std::optional<fs::path>(manifest),
                    d.split.empty() ? std::nullopt : std::optional<std::string>(d.split));
  if (entries.empty()) throw DataError("no annotated images found under " + images);
  return entries;
}

std::vector<AnnotatedImage> load_corpus(const std::vector<DatasetEntry>& entries) {
  std::vector<AnnotatedImage> corpus;
  corpus.reserve(entries.size());
  for (const auto& e : entries) corpus.push_back(load_annotated(e));
  return corpus;
}

std::string model_path(const std::string& flag, const Config& c) {
  const std::string p = flag.empty() ? c.model : flag;
  if (p.empty()) throw UsageError("--model is required (or set model in the config)");
  return p;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_importance(const ForestModel& forest, std::size_t top) {
  const auto& imp = forest.feature_importance();
  const auto& names = descriptor_names();
  std::vector<std::size_t> order(imp.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
  top = std::min(top, order.size());
  std::cout << "rank\tfeature\timportance\n";
  for (std::size_t r = 0; r < top; ++r) {
    const std::size_t f = order[r];
    const std::string name = f < names.size() ? names[f] : "x" + std::to_string(f);
    std::cout << r + 1 << '\t' << name << '\t' << std::setprecision(6) << imp[f] << '\n';
  }
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  DatasetArgs data;
  std::string model;
  std::optional<int> trees;
  std::optional<int> layers;
  std::optional<double> purity;
  std::string fusion;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
  Config c = resolve_config(g);
  if (a.trees) c.trees = *a.trees;
  if (a.layers) c.train_layers = *a.layers;
  if (a.purity) c.purity = *a.purity;
  if (!a.fusion.empty()) c.fusion = parse_fusion_mode(a.fusion);
  c.validate();
  const std::string out = model_path(a.model, c);

  const auto t0 = std::chrono::steady_clock::now();
  const auto corpus = load_corpus(resolve_dataset(a.data, c));
  const auto frag = build_training_set(corpus, c.sample_config(), c.threads);
  const auto& rep = frag.report;
  std::cout << "images: " << corpus.size() << "\n"
            << "layers kept: " << rep.layers_kept << " of " << rep.layers_total << "\n"
            << "samples: " << frag.samples.size() << " (" << rep.positives << " salient, " << rep.negatives
            << " background)\n"
            << "unconfident regions discarded: " << rep.unconfident << " of " << rep.regions << " ("
            << std::fixed << std::setprecision(2) << 100.0 * rep.discard_fraction() << "%)\n"
            << std::defaultfloat;
  if (frag.samples.empty()) throw DataError("no confident regions: nothing to train on");

  DrfiModel model{train_forest(frag.samples, c.forest_params(), c.threads), {}};
  std::cout << "trained " << model.forest.trees().size() << " trees in " << std::setprecision(3)
            << seconds_since(t0) << " s\n";
  if (c.fusion == FusionMode::kLearned) {
    model.fusion = fit_fusion(model.forest, corpus, c.pipeline_options());
    std::cout << "fusion weights:";
    for (double w : model.fusion) std::cout << ' ' << std::setprecision(4) << w;
    std::cout << '\n';
  }
  save_model(out, model);
  std::cout << "model written to " << out << "\n\ntop features:\n";
  print_importance(model.forest, 20);
  return 0;
}

// -------------------------------------------------------------- predict

struct PredictArgs {
  std::string model;
  std::vector<std::string> inputs;
  std::string out;
  bool single_layer = false;
  std::string fusion;
  std::optional<int> layers;
  std::string dump_features;
  std::string dump_labels;
};

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& [stem, path] : list_rasters(in)) files.push_back(path);
    } else {
      files.emplace_back(in);
    }
  }
  return files;
}

int cmd_predict(const Globals& g, const PredictArgs& a) {
  Config c = resolve_config(g);
  if (!a.fusion.empty()) c.fusion = parse_fusion_mode(a.fusion);
  if (a.layers) c.test_layers = *a.layers;
  c.validate();
  const std::string out_dir = a.out.empty() ? c.output_dir : a.out;
  if (out_dir.empty()) throw UsageError("--out is required (or set output_dir)");
  const auto model = load_model(model_path(a.model, c));
  const auto files = expand_inputs(a.inputs);
  if (files.empty()) throw UsageError("no input images given");

  fs::create_directories(out_dir);
  if (!a.dump_features.empty()) fs::create_directories(a.dump_features);
  if (!a.dump_labels.empty()) fs::create_directories(a.dump_labels);
  PipelineOptions opt = c.pipeline_options();
  opt.keep_descriptors = !a.dump_features.empty();

  int failures = 0;
  int worst = 0;
  for (const auto& file : files) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const Image image = read_image(file);
      const std::string stem = file.stem().string();
      SaliencyMap map;
      if (a.dump_features.empty() && a.dump_labels.empty()) {
        map = predict_saliency(model, image, opt, c.fusion, a.single_layer);
      } else {
        // Same computation as predict_saliency, keeping the intermediate layers.
        auto params = opt.schedule.params_for(image.width(), image.height());
        if (a.single_layer) params = {params[single_layer_index(params.size())]};
        const auto layered = predict_layers(model.forest, image, opt, params);
        map = a.single_layer ? layered.maps.front()
                             : fuse(layered.maps, fusion_weights_for(model, c.fusion, layered.maps.size()));
        if (a.single_layer) normalize_min_max(map);
        for (std::size_t l = 0; l < layered.layers.size(); ++l) {
          const std::string tag = stem + "_layer" + (l < 10 ? "0" : "") + std::to_string(l);
          if (!a.dump_features.empty()) {
            std::ofstream csv(fs::path(a.dump_features) / (tag + ".csv"));
            if (!csv) throw DataError("cannot write features under " + a.dump_features);
            write_descriptor_table(csv, layered.descriptors[l]);
          }
          if (!a.dump_labels.empty()) {
            write_image(fs::path(a.dump_labels) / (tag + ".png"), visualize(layered.layers[l], image));
          }
        }
      }
      const fs::path dest = fs::path(out_dir) / (stem + ".png");
      write_saliency(dest, map);
      std::cout << file.string() << " -> " << dest.string() << " (" << std::setprecision(3) << seconds_since(t0)
                << " s)\n";
    } catch (const Error& e) {
      std::cerr << "error: " << file.string() << ": " << e.what() << '\n';
      ++failures;
      worst = std::max(worst, exit_code(e.kind()));
    }
  }
  if (failures > 0) {
    std::cerr << failures << " of " << files.size() << " images failed\n";
    return worst;
  }
  return 0;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  std::string predictions;
  std::string masks;
  std::string out;
};

int cmd_eval(const Globals& g, const EvalArgs& a) {
  const Config c = resolve_config(g);
  const std::string masks = a.masks.empty() ? c.mask_dir : a.masks;
  if (a.predictions.empty() || masks.empty()) throw UsageError("--pred and --masks are required");
  const auto pairing = pair_by_stem(a.predictions, masks);
  for (const auto& s : pairing.only_left) std::cerr << "unmatched prediction: " << s << '\n';
  for (const auto& s : pairing.only_right) std::cerr << "unmatched mask: " << s << '\n';
  if (pairing.pairs.empty()) throw DataError("no prediction/mask pairs share a file stem");

  std::vector<ConfusionTally> tallies;
  std::vector<std::pair<std::string, double>> per_image;
  for (const auto& [pred_path, mask_path] : pairing.pairs) {
    const Mask mask = read_mask(mask_path);
    const GrayMap gray = read_gray(pred_path);
    if (!gray.same_shape(mask)) {
      throw DataError(pred_path.string() + ": prediction size differs from mask " + mask_path.string());
    }
    tallies.push_back(tally(gray, mask));
    const auto& t = tallies.back();
    per_image.emplace_back(pred_path.stem().string(),
                           t.positives > 0 && t.negatives > 0 ? curves(t).auc : std::numeric_limits<double>::quiet_NaN());
  }
  const auto result = aggregate(tallies);

  std::ostringstream summary;
  summary << std::setprecision(6);
  summary << "pairs: " << pairing.pairs.size() << "\n"
          << "pooled AUC: " << result.pooled.auc << "\n"
          << "mean per-image AUC: " << result.mean_auc << " (over " << result.images_in_mean << " images)\n";
  std::cout << summary.str();

  if (!a.out.empty()) {
    fs::create_directories(a.out);
    std::ofstream table(fs::path(a.out) / "curves.tsv");
    write_curve_table(table, result.pooled);
    std::ofstream report(fs::path(a.out) / "summary.txt");
    report << summary.str() << "\nimage\tauc\n";
    for (const auto& [stem, auc] : per_image) report << stem << '\t' << auc << '\n';
    if (!table || !report) throw DataError("cannot write evaluation output under " + a.out);
    std::cout << "curves and summary written to " << a.out << '\n';
  }
  return 0;
}

// ---------------------------------------------------- importance, fusion

int cmd_importance(const Globals& g, const std::string& model_flag, std::size_t top) {
  const Config c = resolve_config(g);
  const auto model = load_model(model_path(model_flag, c));
  print_importance(model.forest, top);
  return 0;
}

struct FusionArgs {
  DatasetArgs data;
  std::string model;
  std::string out;
};

int cmd_learn_fusion(const Globals& g, const FusionArgs& a) {
  Config c = resolve_config(g);
  c.validate();
  const std::string in = model_path(a.model, c);
  auto model = load_model(in);
  const auto entries = resolve_dataset(a.data, c);
  const auto opt = c.pipeline_options();
  FusionFitter fitter(static_cast<std::size_t>(opt.schedule.layers));
  for (const auto& e : entries) {
    const auto item = load_annotated(e);
    fitter.add(predict_layers(model.forest, item.image, opt).maps, item.mask);
  }
  model.fusion = fitter.solve();
  const std::string out = a.out.empty() ? in : a.out;
  save_model(out, model);
  std::cout << "fusion weights from " << entries.size() << " images:";
  for (double w : model.fusion) std::cout << ' ' << std::setprecision(4) << w;
  std::cout << "\nmodel written to " << out << '\n';
  return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  std::size_t count = 20;
  int width = 128;
  int height = 96;
  double train_fraction = 0.75;
};

std::string stem_for(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "img%05zu", i);
  return buf;
}

int cmd_synth(const Globals& g, const SynthArgs& a) {
  const Config c = resolve_config(g);
  if (a.out.empty()) throw UsageError("--out is required");
  if (a.width < 8 || a.height < 8) throw UsageError("synthetic images need at least 8x8 pixels");
  const fs::path root(a.out);
  fs::create_directories(root / "images");
  fs::create_directories(root / "masks");
  const auto corpus = synthesize_corpus(a.count, c.seed, {.width = a.width, .height = a.height}, c.threads);
  const auto train = static_cast<std::size_t>(a.train_fraction * static_cast<double>(a.count) + 0.5);
  std::ofstream manifest(root / "manifest.txt");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string stem = stem_for(i);
    write_image(root / "images" / (stem + ".png"), corpus[i].image);
    GrayMap mask(corpus[i].mask.width(), corpus[i].mask.height());
    for (std::size_t p = 0; p < mask.size(); ++p) mask[p] = corpus[i].mask[p] ? 255 : 0;
    write_gray(root / "masks" / (stem + ".png"), mask);
    manifest << stem << ' ' << (i < train ? "train" : "test") << '\n';
  }
  if (!manifest) throw DataError("cannot write " + (root / "manifest.txt").string());
  std::cout << "wrote " << corpus.size() << " images (" << train << " train, " << corpus.size() - train
            << " test) to " << root.string() << '\n';
  return 0;
}

int cmd_config(const Globals& g) {
  const Config c = resolve_config(g);
  c.validate();
  std::cout << format_config(c);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regional saliency: train, predict and evaluate salient-object maps"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--set", g.overrides, "Override one config key (key=value); repeatable");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a regressor from annotated images");
  add_dataset_options(train_cmd, train.data);
  train_cmd->add_option("--model", train.model, "Output model file");
  train_cmd->add_option("--trees", train.trees, "Number of trees");
  train_cmd->add_option("--layers", train.layers, "Training segmentation layers per image");
  train_cmd->add_option("--purity", train.purity, "Confident-region purity threshold");
  train_cmd->add_option("--fusion", train.fusion, "average | learned (learned also fits fusion weights)");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Write saliency maps for images");
  predict_cmd->add_option("--model", predict.model, "Model file");
  predict_cmd->add_option("--out", predict.out, "Output directory for 8-bit maps");
  predict_cmd->add_option("inputs", predict.inputs, "Image files or directories")->required();
  predict_cmd->add_flag("--single-layer", predict.single_layer, "Use only the mid-schedule segmentation");
  predict_cmd->add_option("--fusion", predict.fusion, "average | learned");
  predict_cmd->add_option("--layers", predict.layers, "Test-time segmentation layers");
  predict_cmd->add_option("--dump-features", predict.dump_features, "Write per-layer descriptor tables here");
  predict_cmd->add_option("--dump-labels", predict.dump_labels, "Write per-layer segmentation images here");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score saliency maps against masks");
  eval_cmd->add_option("--pred", eval.predictions, "Directory of predicted maps");
  eval_cmd->add_option("--masks", eval.masks, "Directory of ground-truth masks");
  eval_cmd->add_option("--out", eval.out, "Directory for curves.tsv and summary.txt");

  std::string importance_model;
  std::size_t importance_top = 20;
  auto* importance_cmd = app.add_subcommand("importance", "List the most important descriptor features");
  importance_cmd->add_option("--model", importance_model, "Model file");
  importance_cmd->add_option("--top", importance_top, "How many features to list");

  FusionArgs fusion;
  auto* fusion_cmd = app.add_subcommand("learn-fusion", "Fit least-squares layer fusion weights into a model");
  add_dataset_options(fusion_cmd, fusion.data);
  fusion_cmd->add_option("--model", fusion.model, "Model file to update");
  fusion_cmd->add_option("--out", fusion.out, "Write the updated model here instead of in place");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic annotated dataset");
  synth_cmd->add_option("--out", synth.out, "Output directory (images/, masks/, manifest.txt)");
  synth_cmd->add_option("--count", synth.count, "Number of images");
  synth_cmd->add_option("--width", synth.width, "Image width");
  synth_cmd->add_option("--height", synth.height, "Image height");
  synth_cmd->add_option("--train-fraction", synth.train_fraction, "Share tagged 'train' in the manifest")
      ->check(CLI::Range(0.0, 1.0));

  auto* config_cmd = app.add_subcommand("config", "Print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) return cmd_train(g, train);
    if (*predict_cmd) return cmd_predict(g, predict);
    if (*eval_cmd) return cmd_eval(g, eval);
    if (*importance_cmd) return cmd_importance(g, importance_model, importance_top);
    if (*fusion_cmd) return cmd_learn_fusion(g, fusion);
    if (*synth_cmd) return cmd_synth(g, synth);
    if (*config_cmd) return cmd_config(g);
  } catch (const drfi::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return drfi::exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return drfi::exit_code(drfi::ErrorKind::kData);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return drfi::exit_code(drfi::ErrorKind::kInvariant);
  }
  return 1;
}
