#include "drfi/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "drfi/error.hpp"

namespace drfi {
namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Field {
  std::string name;
  std::function<std::string(const Config&)> get;
  std::function<void(Config&, std::string_view)> set;
};

template <typename T>
Field numeric(std::string name, T Config::*member) {
  return {name,
          [member](const Config& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          },
          [member, name](Config& c, std::string_view v) { c.*member = parse_number<T>(name, v); }};
}

Field text(std::string name, std::string Config::*member) {
  return {name, [member](const Config& c) { return c.*member; },
          [member](Config& c, std::string_view v) { c.*member = std::string(v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      numeric("train_layers", &Config::train_layers),
      numeric("test_layers", &Config::test_layers),
      numeric("k_min", &Config::k_min),
      numeric("k_max", &Config::k_max),
      numeric("min_region_fraction", &Config::min_region_fraction),
      numeric("min_region_floor", &Config::min_region_floor),
      numeric("smoothing_sigma", &Config::smoothing_sigma),
      numeric("connectivity", &Config::connectivity),
      numeric("sigma_s", &Config::sigma_s),
      numeric("border_width", &Config::border_width),
      numeric("purity", &Config::purity),
      numeric("discard_ratio", &Config::discard_ratio),
      numeric("trees", &Config::trees),
      numeric("features_per_node", &Config::features_per_node),
      numeric("leaf_min", &Config::leaf_min),
      numeric("seed", &Config::seed),
      Field{"fusion", [](const Config& c) { return std::string(to_string(c.fusion)); },
            [](Config& c, std::string_view v) { c.fusion = parse_fusion_mode(v); }},
      numeric("threads", &Config::threads),
      text("image_dir", &Config::image_dir),
      text("mask_dir", &Config::mask_dir),
      text("manifest", &Config::manifest),
      text("model", &Config::model),
      text("output_dir", &Config::output_dir),
  };
  return table;
}

}  // namespace

std::string_view to_string(FusionMode mode) { return mode == FusionMode::kLearned ? "learned" : "average"; }

FusionMode parse_fusion_mode(std::string_view text) {
  if (text == "average") return FusionMode::kAverage;
  if (text == "learned") return FusionMode::kLearned;
  throw UsageError("fusion mode must be 'average' or 'learned', got '" + std::string(text) + "'");
}

const std::vector<std::string>& config_keys() {
  static const auto keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.name);
    return k;
  }();
  return keys;
}

void Config::set(std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (f.name == key) {
      f.set(*this, value);
      return;
    }
  }
  throw UsageError("unknown config key '" + std::string(key) + "'");
}

void Config::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw UsageError(std::string("config: ") + what);
  };
  require(train_layers >= 1, "train_layers must be >= 1");
  require(test_layers >= 1, "test_layers must be >= 1");
  require(k_min > 0.0 && k_max >= k_min, "need 0 < k_min <= k_max");
  require(min_region_fraction >= 0.0 && min_region_fraction < 1.0, "min_region_fraction must lie in [0, 1)");
  require(min_region_floor >= 1, "min_region_floor must be >= 1");
  require(smoothing_sigma >= 0.0, "smoothing_sigma must be >= 0");
  require(connectivity == 4 || connectivity == 8, "connectivity must be 4 or 8");
  require(sigma_s > 0.0, "sigma_s must be positive");
  require(border_width >= 1, "border_width must be >= 1");
  require(purity > 0.5 && purity <= 1.0, "purity must lie in (0.5, 1]");
  require(discard_ratio > 0.0, "discard_ratio must be positive");
  require(trees >= 1, "trees must be >= 1");
  require(features_per_node >= 1, "features_per_node must be >= 1");
  require(leaf_min >= 1, "leaf_min must be >= 1");
  require(threads >= 0, "threads must be >= 0 (0 = all cores)");
}

SegSchedule Config::train_schedule() const {
  SegSchedule s = test_schedule();
  s.layers = train_layers;
  return s;
}

SegSchedule Config::test_schedule() const {
  SegSchedule s;
  s.layers = test_layers;
  s.k_min = k_min;
  s.k_max = k_max;
  s.min_region_fraction = min_region_fraction;
  s.min_region_floor = min_region_floor;
  s.smoothing_sigma = smoothing_sigma;
  s.connectivity = connectivity == 8 ? Connectivity::kEight : Connectivity::kFour;
  return s;
}

SampleConfig Config::sample_config() const {
  SampleConfig c;
  c.schedule = train_schedule();
  c.purity = purity;
  c.discard_ratio = discard_ratio;
  c.sigma_s = sigma_s;
  c.border_width = border_width;
  return c;
}

ForestParams Config::forest_params() const {
  ForestParams p;
  p.trees = trees;
  p.features_per_node = features_per_node;
  p.leaf_min = leaf_min;
  p.seed = seed;
  return p;
}

PipelineOptions Config::pipeline_options() const {
  PipelineOptions o;
  o.schedule = test_schedule();
  o.sigma_s = sigma_s;
  o.border_width = border_width;
  o.threads = threads;
  return o;
}

Config parse_config(std::string_view text) {
  Config config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

std::string format_config(const Config& config) {
  std::ostringstream out;
  for (const auto& f : fields()) out << f.name << " = " << f.get(config) << '\n';
  return out.str();
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace drfi
