#include "drfi/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "drfi/error.hpp"
#include "drfi/parallel.hpp"
#include "drfi/random.hpp"

namespace drfi {
namespace {

using Color = std::array<double, 3>;

Color random_color(Rng& rng) { return {rng.uniform(20, 235), rng.uniform(20, 235), rng.uniform(20, 235)}; }

double distance(const Color& a, const Color& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

// Luminance texture: oriented stripes or bilinear value noise.
class Texture {
 public:
  Texture(Rng& rng, int width, int height, double min_amp = 6.0, double max_amp = 30.0) {
    amplitude_ = rng.uniform(min_amp, max_amp);
    stripes_ = rng.uniform() < 0.5;
    if (stripes_) {
      frequency_ = rng.uniform(0.06, 0.3);
      const double phi = rng.uniform(0.0, std::numbers::pi);
      cos_ = std::cos(phi);
      sin_ = std::sin(phi);
    } else {
      cell_ = static_cast<int>(rng.uniform(4.0, 14.0));
      grid_w_ = width / cell_ + 2;
      grid_h_ = height / cell_ + 2;
      grid_.resize(static_cast<std::size_t>(grid_w_ * grid_h_));
      for (auto& g : grid_) g = rng.uniform(-1.0, 1.0);
    }
  }

  double operator()(int x, int y) const {
    if (stripes_) return amplitude_ * std::sin(2.0 * std::numbers::pi * frequency_ * (x * cos_ + y * sin_));
    const double gx = static_cast<double>(x) / cell_;
    const double gy = static_cast<double>(y) / cell_;
    const int ix = static_cast<int>(gx);
    const int iy = static_cast<int>(gy);
    const double fx = gx - ix;
    const double fy = gy - iy;
    auto at = [&](int a, int b) { return grid_[static_cast<std::size_t>(b * grid_w_ + a)]; };
    const double top = at(ix, iy) * (1 - fx) + at(ix + 1, iy) * fx;
    const double bottom = at(ix, iy + 1) * (1 - fx) + at(ix + 1, iy + 1) * fx;
    return amplitude_ * (top * (1 - fy) + bottom * fy);
  }

 private:
  double amplitude_ = 0.0;
  bool stripes_ = true;
  double frequency_ = 0.0;
  double cos_ = 1.0;
  double sin_ = 0.0;
  int cell_ = 8;
  int grid_w_ = 0;
  int grid_h_ = 0;
  std::vector<double> grid_;
};

// Ellipse, rectangle, or ellipse with a wavy outline, centred at (cx, cy).
struct Shape {
  enum Kind { kEllipse, kRect, kBlob } kind = kEllipse;
  double cx = 0, cy = 0, rx = 1, ry = 1, angle = 0;
  double wobble = 0, lobes = 0, phase = 0;

  bool contains(double x, double y) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double u = (c * (x - cx) + s * (y - cy)) / rx;
    const double v = (-s * (x - cx) + c * (y - cy)) / ry;
    switch (kind) {
      case kRect:
        return std::abs(u) <= 1.0 && std::abs(v) <= 1.0;
      case kBlob: {
        const double r = 1.0 + wobble * std::sin(lobes * std::atan2(v, u) + phase);
        return u * u + v * v <= r * r;
      }
      default:
        return u * u + v * v <= 1.0;
    }
  }
};

Shape random_shape(Rng& rng, double cx, double cy, double rx, double ry) {
  Shape s;
  const double pick = rng.uniform();
  s.kind = pick < 0.4 ? Shape::kEllipse : (pick < 0.7 ? Shape::kRect : Shape::kBlob);
  s.cx = cx;
  s.cy = cy;
  s.rx = rx;
  s.ry = ry;
  s.angle = s.kind == Shape::kRect ? rng.uniform(-0.3, 0.3) : rng.uniform(0.0, std::numbers::pi);
  s.wobble = rng.uniform(0.1, 0.25);
  s.lobes = std::floor(rng.uniform(3.0, 7.0));
  s.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return s;
}

}  // namespace

AnnotatedImage synthesize(std::uint64_t seed, std::size_t index, const SyntheticOptions& options) {
  const int w = options.width;
  const int h = options.height;
  if (w < 8 || h < 8) throw InvalidInput("synthetic images must be at least 8x8");
  Rng rng(seed, index);

  // Background: two-color linear gradient plus texture.
  const Color c1 = random_color(rng);
  Color c2 = c1;
  for (auto& v : c2) v = std::clamp(v + rng.uniform(-60.0, 60.0), 0.0, 255.0);
  const double grad_angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double gdx = std::cos(grad_angle);
  const double gdy = std::sin(grad_angle);

  // Salient cue of this image: color, texture alone, or lightness alone.
  enum class Cue { kColor, kTexture, kLightness };
  const double cue_pick = rng.uniform();
  const Cue cue = cue_pick < 0.5 ? Cue::kColor : (cue_pick < 0.75 ? Cue::kTexture : Cue::kLightness);
  const bool smooth_background = cue == Cue::kTexture && rng.uniform() < 0.5;
  const Texture bg_texture = smooth_background ? Texture(rng, w, h, 0.0, 3.0) : Texture(rng, w, h);

  // Distractors: background-like patches, plus strongly colored ones kept on the border.
  struct Patch {
    Shape shape;
    Color color;
    Texture texture;
  };
  std::vector<Patch> patches;
  const int patch_count = static_cast<int>(rng.below(5));
  for (int p = 0; p < patch_count; ++p) {
    const double rx = rng.uniform(0.08, 0.25) * w;
    const double ry = rng.uniform(0.08, 0.25) * h;
    const bool loud = rng.uniform() < 0.5;
    double px = rng.uniform(0.0, 1.0) * w;
    double py = rng.uniform(0.0, 1.0) * h;
    if (loud) {
      // Centre within half a radius of some image edge.
      switch (rng.below(4)) {
        case 0: px = rng.uniform(-0.5, 0.5) * rx; break;
        case 1: px = w - rng.uniform(-0.5, 0.5) * rx; break;
        case 2: py = rng.uniform(-0.5, 0.5) * ry; break;
        default: py = h - rng.uniform(-0.5, 0.5) * ry; break;
      }
    }
    Shape s = random_shape(rng, px, py, rx, ry);
    Color col = c1;
    if (loud) {
      col = random_color(rng);
    } else {
      for (auto& v : col) v = std::clamp(v + rng.uniform(-40.0, 40.0), 0.0, 255.0);
    }
    patches.push_back({s, col, smooth_background ? Texture(rng, w, h, 0.0, 3.0) : Texture(rng, w, h)});
  }

  // Salient objects: mostly one, sometimes two; biased toward the centre.
  std::vector<Patch> objects;
  const int object_count = rng.uniform() < 0.8 ? 1 : 2;
  const Color bg_mean{(c1[0] + c2[0]) / 2, (c1[1] + c2[1]) / 2, (c1[2] + c2[2]) / 2};
  for (int o = 0; o < object_count; ++o) {
    const double scale = object_count == 1 ? 1.0 : 0.7;
    const double rx = rng.uniform(0.1, 0.28) * w * scale;
    const double ry = rng.uniform(0.12, 0.32) * h * scale;
    const bool central = rng.uniform() < 0.75;
    const double cx = (central ? rng.uniform(0.3, 0.7) : rng.uniform(0.15, 0.85)) * w;
    const double cy = (central ? rng.uniform(0.3, 0.7) : rng.uniform(0.15, 0.85)) * h;
    const Shape s = random_shape(rng, cx, cy, rx, ry);
    Color col = bg_mean;
    switch (cue) {
      case Cue::kColor: {
        const double min_contrast = rng.uniform(30.0, 120.0);
        col = random_color(rng);
        for (int attempt = 0; attempt < 64 && distance(col, bg_mean) < min_contrast; ++attempt) col = random_color(rng);
        break;
      }
      case Cue::kTexture:
        for (auto& v : col) v = std::clamp(v + rng.uniform(-12.0, 12.0), 0.0, 255.0);
        break;
      case Cue::kLightness: {
        const double shift = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(30.0, 70.0);
        for (auto& v : col) v = std::clamp(v + shift, 0.0, 255.0);
        break;
      }
    }
    const Texture tex = cue != Cue::kTexture ? Texture(rng, w, h)
                        : smooth_background ? Texture(rng, w, h, 25.0, 45.0)
                                            : Texture(rng, w, h, 0.0, 3.0);
    objects.push_back({s, col, tex});
  }
  const double noise_sigma = rng.uniform(2.0, 8.0);

  AnnotatedImage out;
  out.name = "synthetic_" + std::to_string(seed) + "_" + std::to_string(index);
  out.image = Image(w, h);
  out.mask = Mask(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = std::clamp(0.5 + ((x - 0.5 * w) * gdx + (y - 0.5 * h) * gdy) / (w + h), 0.0, 1.0);
      Color c;
      double tex = bg_texture(x, y);
      for (std::size_t k = 0; k < 3; ++k) c[k] = c1[k] * (1 - t) + c2[k] * t;
      for (const auto& p : patches) {
        if (p.shape.contains(x, y)) {
          c = p.color;
          tex = p.texture(x, y);
        }
      }
      for (const auto& ob : objects) {
        if (ob.shape.contains(x, y)) {
          c = ob.color;
          tex = ob.texture(x, y);
          out.mask(x, y) = 1;
        }
      }
      Rgb& px = out.image(x, y);
      std::array<std::uint8_t*, 3> dst{&px.r, &px.g, &px.b};
      for (std::size_t k = 0; k < 3; ++k) {
        *dst[k] = static_cast<std::uint8_t>(std::lround(std::clamp(c[k] + tex + noise_sigma * rng.normal(), 0.0, 255.0)));
      }
    }
  }
  return out;
}

std::vector<AnnotatedImage> synthesize_corpus(std::size_t count, std::uint64_t seed, const SyntheticOptions& options,
                                              int threads) {
  std::vector<AnnotatedImage> corpus(count);
  parallel_for(count, threads, [&](std::size_t i) { corpus[i] = synthesize(seed, i, options); });
  return corpus;
}

}  // namespace drfi
