#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "drfi/dataset.hpp"
#include "drfi/evaluation.hpp"
#include "drfi/image_io.hpp"
#include "drfi/model_io.hpp"
#include "drfi/random.hpp"

namespace drfi {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "drfi_cli_test_output.txt";
  const std::string cmd = std::string(DRFI_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t sample_count(const std::string& out) {
  std::smatch m;
  if (!std::regex_search(out, m, std::regex("samples: (\\d+)"))) return 0;
  return std::stoul(m[1]);
}

double pooled_auc(const std::string& out) {
  std::smatch m;
  if (!std::regex_search(out, m, std::regex("pooled AUC: ([0-9.eE+-]+)"))) return -1;
  return std::stod(m[1]);
}

// One small synthetic dataset and model shared by every test.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "drfi_cli_test";
    fs::remove_all(root_);
    const auto synth = run("--seed 5 synth --out " + root_.string() + "/data --count 6 --train-fraction 0.5");
    ASSERT_EQ(synth.code, 0) << synth.out;
    const auto train = run(train_args("model.drfi"));
    ASSERT_EQ(train.code, 0) << train.out;
    train_output_ = train.out;
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static std::string train_args(const std::string& model, const std::string& extra = "") {
    return "--seed 3 train --images " + (root_ / "data/images").string() + " --masks " +
           (root_ / "data/masks").string() + " --manifest " + (root_ / "data/manifest.txt").string() +
           " --split train --trees 5 --layers 12 --model " + (root_ / model).string() + " " + extra;
  }

  static fs::path root_;
  static std::string train_output_;
};

fs::path Cli::root_;
std::string Cli::train_output_;

TEST_F(Cli, SynthWritesDatasetAndManifest) {
  EXPECT_EQ(list_rasters(root_ / "data/images").size(), 6u);
  EXPECT_EQ(list_rasters(root_ / "data/masks").size(), 6u);
  const auto manifest = slurp(root_ / "data/manifest.txt");
  EXPECT_NE(manifest.find("img00000 train"), std::string::npos);
  EXPECT_NE(manifest.find("img00005 test"), std::string::npos);
}

TEST_F(Cli, TrainReportsAndWritesLoadableModel) {
  EXPECT_NE(train_output_.find("unconfident regions discarded"), std::string::npos);
  EXPECT_NE(train_output_.find("top features"), std::string::npos);
  EXPECT_GT(sample_count(train_output_), 0u);
  const auto model = load_model(root_ / "model.drfi");
  EXPECT_EQ(model.forest.trees().size(), 5u);
  EXPECT_EQ(model.forest.dims(), 93u);
  Rng rng(1);
  std::vector<double> x(93);
  for (int i = 0; i < 50; ++i) {
    for (auto& v : x) v = rng.uniform();
    const double y = model.forest.predict(x);
    EXPECT_GE(y, 0.0);
    EXPECT_LE(y, 1.0);
  }
}

TEST_F(Cli, FixedSeedGivesIdenticalModelBytes) {
  ASSERT_EQ(run(train_args("again.drfi", "--threads 2")).code, 0);
  EXPECT_EQ(slurp(root_ / "model.drfi"), slurp(root_ / "again.drfi"));
}

TEST_F(Cli, StricterPurityGivesNoMoreSamples) {
  const auto strict = run(train_args("strict.drfi", "--purity 1.0"));
  ASSERT_EQ(strict.code, 0) << strict.out;
  EXPECT_LE(sample_count(strict.out), sample_count(train_output_));
}

TEST_F(Cli, PredictKeepsShapeAndIsDeterministic) {
  const std::string common = "predict --model " + (root_ / "model.drfi").string() + " ";
  ASSERT_EQ(run(common + "--out " + (root_ / "pred1").string() + " " + (root_ / "data/images").string()).code, 0);
  ASSERT_EQ(run(common + "--out " + (root_ / "pred2").string() + " " + (root_ / "data/images").string()).code, 0);
  for (const auto& [stem, path] : list_rasters(root_ / "data/images")) {
    const auto in = read_image(path);
    const auto out = read_gray(root_ / "pred1" / (stem + ".png"));
    EXPECT_EQ(out.width(), in.width());
    EXPECT_EQ(out.height(), in.height());
    EXPECT_EQ(slurp(root_ / "pred1" / (stem + ".png")), slurp(root_ / "pred2" / (stem + ".png")));
  }
}

TEST_F(Cli, PredictLargeImageSingleLayerAndDumps) {
  Rng rng(2);
  Image big(400, 300);
  for (int y = 0; y < 300; ++y) {
    for (int x = 0; x < 400; ++x) {
      const bool obj = (x - 200) * (x - 200) + (y - 150) * (y - 150) < 60 * 60;
      big(x, y) = obj ? Rgb{220, 40, 40} : Rgb{40, static_cast<std::uint8_t>(100 + rng.below(40)), 90};
    }
  }
  fs::create_directories(root_ / "big");
  write_image(root_ / "big/scene.png", big);
  const auto r = run("predict --single-layer --model " + (root_ / "model.drfi").string() + " --out " +
                     (root_ / "big_out").string() + " --dump-features " + (root_ / "feat").string() +
                     " --dump-labels " + (root_ / "labels").string() + " " + (root_ / "big/scene.png").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto map = read_gray(root_ / "big_out/scene.png");
  EXPECT_EQ(map.width(), 400);
  EXPECT_EQ(map.height(), 300);
  const auto csv = slurp(root_ / "feat/scene_layer00.csv");
  EXPECT_EQ(csv.rfind("region,c1,", 0), 0u);
  EXPECT_EQ(read_image(root_ / "labels/scene_layer00.png").width(), 400);
}

TEST_F(Cli, EvalPerfectInvertedAndComposition) {
  const fs::path masks = root_ / "data/masks";
  fs::create_directories(root_ / "inverted");
  for (const auto& [stem, path] : list_rasters(masks)) {
    auto m = read_gray(path);
    for (auto& v : m) v = static_cast<std::uint8_t>(255 - v);
    write_gray(root_ / "inverted" / (stem + ".png"), m);
  }
  const auto perfect = run("eval --pred " + masks.string() + " --masks " + masks.string());
  ASSERT_EQ(perfect.code, 0) << perfect.out;
  EXPECT_EQ(pooled_auc(perfect.out), 1.0);
  const auto inverted = run("eval --pred " + (root_ / "inverted").string() + " --masks " + masks.string());
  EXPECT_EQ(pooled_auc(inverted.out), 0.0);

  // Three pairs scored by the CLI and by the library directly.
  const fs::path three = root_ / "three";
  fs::create_directories(three / "pred");
  fs::create_directories(three / "gt");
  Rng rng(3);
  std::vector<ConfusionTally> tallies;
  for (int k = 0; k < 3; ++k) {
    GrayMap pred(20, 15);
    GrayMap gt(20, 15);
    Mask mask(20, 15);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      mask[i] = rng.below(3) == 0;
      gt[i] = mask[i] ? 255 : 0;
      pred[i] = static_cast<std::uint8_t>(rng.below(200) + (mask[i] ? 55 : 0));
    }
    const std::string stem = "p" + std::to_string(k);
    write_gray(three / "pred" / (stem + ".png"), pred);
    write_gray(three / "gt" / (stem + ".png"), gt);
    tallies.push_back(tally(pred, mask));
  }
  const auto r = run("eval --pred " + (three / "pred").string() + " --masks " + (three / "gt").string() +
                     " --out " + (three / "report").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(pooled_auc(r.out), aggregate(tallies).pooled.auc, 1e-6);
  EXPECT_TRUE(fs::exists(three / "report/curves.tsv"));
  EXPECT_TRUE(fs::exists(three / "report/summary.txt"));
}

TEST_F(Cli, ImportanceAndLearnFusion) {
  const auto imp = run("importance --top 5 --model " + (root_ / "model.drfi").string());
  ASSERT_EQ(imp.code, 0);
  EXPECT_NE(imp.out.find("rank\tfeature\timportance"), std::string::npos);
  const auto fused = run("learn-fusion --images " + (root_ / "data/images").string() + " --masks " +
                         (root_ / "data/masks").string() + " --model " + (root_ / "model.drfi").string() +
                         " --out " + (root_ / "fused.drfi").string());
  ASSERT_EQ(fused.code, 0) << fused.out;
  EXPECT_EQ(load_model(root_ / "fused.drfi").fusion.size(), 15u);
  const auto r = run("predict --fusion learned --model " + (root_ / "fused.drfi").string() + " --out " +
                     (root_ / "pred_learned").string() + " " + (root_ / "data/images/img00000.png").string());
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("train --no-such-flag").code, 1);
  EXPECT_EQ(run("--set bogus=1 config").code, 1);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("config").code, 0);
  EXPECT_EQ(run("importance --model " + (root_ / "missing.drfi").string()).code, 2);
  fs::create_directories(root_ / "empty");
  EXPECT_EQ(run("eval --pred " + (root_ / "empty").string() + " --masks " + (root_ / "data/masks").string()).code, 2);
  std::ofstream(root_ / "bad.drfi") << "DRFX1 definitely not a model";
  EXPECT_EQ(run("importance --model " + (root_ / "bad.drfi").string()).code, 2);
}

TEST_F(Cli, ConfigFileRoundTrip) {
  const auto printed = run("--seed 77 --set trees=9 config");
  ASSERT_EQ(printed.code, 0);
  std::ofstream(root_ / "drfi.conf") << printed.out;
  const auto again = run("--config " + (root_ / "drfi.conf").string() + " config");
  EXPECT_EQ(again.out, printed.out);
  EXPECT_NE(again.out.find("trees = 9"), std::string::npos);
  EXPECT_NE(again.out.find("seed = 77"), std::string::npos);
}

}  // namespace
}  // namespace drfi
