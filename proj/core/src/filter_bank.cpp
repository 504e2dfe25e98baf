#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <numbers>

#include "drfi/pixel_features.hpp"

namespace drfi {
namespace {

double gauss1d(double sigma, double x, int order) {
  const double g = std::exp(-x * x / (2.0 * sigma * sigma)) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  switch (order) {
    case 1:
      return -x / (sigma * sigma) * g;
    case 2:
      return (x * x - sigma * sigma) / (sigma * sigma * sigma * sigma) * g;
    default:
      return g;
  }
}

template <typename Fn>
Kernel sample_kernel(int radius, Fn&& fn) {
  Kernel k;
  k.radius = radius;
  const int side = 2 * radius + 1;
  k.taps.resize(static_cast<std::size_t>(side * side));
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      k.taps[static_cast<std::size_t>((dy + radius) * side + (dx + radius))] = fn(static_cast<double>(dx), static_cast<double>(dy));
    }
  }
  return k;
}

void zero_mean_l1(Kernel& k) {
  double mean = 0.0;
  for (const double t : k.taps) mean += t;
  mean /= static_cast<double>(k.taps.size());
  double l1 = 0.0;
  for (auto& t : k.taps) {
    t -= mean;
    l1 += std::abs(t);
  }
  for (auto& t : k.taps) t /= l1;
}

FilterBank make_bank() {
  FilterBank bank;
  constexpr int kOrientations = 6;
  const std::array<double, 3> oriented_scales{1.0, std::numbers::sqrt2, 2.0};
  int channel = 0;
  for (const double sigma : oriented_scales) {
    const int radius = static_cast<int>(std::ceil(3.0 * 3.0 * sigma));
    for (int order = 1; order <= 2; ++order) {  // edge, then bar
      for (int o = 0; o < kOrientations; ++o) {
        const double theta = std::numbers::pi * o / kOrientations;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        Kernel k = sample_kernel(radius, [&](double dx, double dy) {
          const double along = c * dx + s * dy;
          const double across = -s * dx + c * dy;
          return gauss1d(3.0 * sigma, along, 0) * gauss1d(sigma, across, order);
        });
        zero_mean_l1(k);
        bank.kernels.push_back(std::move(k));
        bank.channel.push_back(channel);
      }
      ++channel;
    }
  }

  const std::array<double, 4> base{1.0, std::numbers::sqrt2, 2.0, 2.0 * std::numbers::sqrt2};
  for (const double factor : {1.0, 3.0}) {
    for (const double b : base) {
      const double sigma = b * factor;
      const int radius = static_cast<int>(std::ceil(3.0 * sigma));
      Kernel k = sample_kernel(radius, [&](double dx, double dy) {
        const double r2 = dx * dx + dy * dy;
        return (r2 - 2.0 * sigma * sigma) * std::exp(-r2 / (2.0 * sigma * sigma));
      });
      zero_mean_l1(k);
      bank.kernels.push_back(std::move(k));
      bank.channel.push_back(channel++);
    }
  }

  Kernel g = sample_kernel(3, [](double dx, double dy) { return gauss1d(1.0, dx, 0) * gauss1d(1.0, dy, 0); });
  double sum = 0.0;
  for (const double t : g.taps) sum += t;
  for (auto& t : g.taps) t /= sum;
  bank.kernels.push_back(std::move(g));
  bank.channel.push_back(channel++);
  return bank;
}

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

int fft_friendly(int n) {
  for (;; ++n) {
    int m = n;
    for (const int p : {2, 3, 5}) {
      while (m % p == 0) m /= p;
    }
    if (m == 1) return n;
  }
}

}  // namespace

const FilterBank& filter_bank() {
  static const FilterBank bank = make_bank();
  return bank;
}

Plane<double> correlate(const Plane<double>& src, const Kernel& kernel) {
  const int w = src.width();
  const int h = src.height();
  const int r = kernel.radius;
  Plane<double> out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        const int sy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -r; dx <= r; ++dx) {
          acc += kernel.at(dx, dy) * src(std::clamp(x + dx, 0, w - 1), sy);
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

std::vector<Plane<double>> correlate_all(const Plane<double>& src, std::span<const Kernel> kernels, int pad_radius) {
  std::vector<Plane<double>> out;
  if (kernels.empty()) return out;
  int radius = pad_radius;
  for (const auto& k : kernels) radius = std::max(radius, k.radius);

  const int w = src.width();
  const int h = src.height();
  // Clamp-padded frame large enough that circular wrap never reaches the crop.
  const int fw = fft_friendly(w + 2 * radius);
  const int fh = fft_friendly(h + 2 * radius);
  const std::size_t real_n = static_cast<std::size_t>(fw) * static_cast<std::size_t>(fh);
  const std::size_t cplx_n = static_cast<std::size_t>(fh) * static_cast<std::size_t>(fw / 2 + 1);

  std::unique_ptr<double, FftwFree> real(fftw_alloc_real(real_n));
  std::unique_ptr<fftw_complex, FftwFree> spec(fftw_alloc_complex(cplx_n));
  std::unique_ptr<fftw_complex, FftwFree> image_spec(fftw_alloc_complex(cplx_n));
  std::unique_ptr<fftw_plan_s, PlanDestroy> forward;
  std::unique_ptr<fftw_plan_s, PlanDestroy> inverse;
  {
    std::lock_guard lock(fftw_planner_mutex());
    forward.reset(fftw_plan_dft_r2c_2d(fh, fw, real.get(), spec.get(), FFTW_ESTIMATE));
    inverse.reset(fftw_plan_dft_c2r_2d(fh, fw, spec.get(), real.get(), FFTW_ESTIMATE));
  }

  double* buf = real.get();
  for (int y = 0; y < fh; ++y) {
    const int sy = std::clamp(y - radius, 0, h - 1);
    for (int x = 0; x < fw; ++x) {
      buf[static_cast<std::size_t>(y) * fw + x] = src(std::clamp(x - radius, 0, w - 1), sy);
    }
  }
  fftw_execute(forward.get());
  std::memcpy(image_spec.get(), spec.get(), cplx_n * sizeof(fftw_complex));

  const double scale = 1.0 / static_cast<double>(real_n);
  for (const auto& k : kernels) {
    std::fill_n(buf, real_n, 0.0);
    // Correlation == convolution with the mirrored kernel: tap (dx,dy) goes to (-dx,-dy) mod size.
    for (int dy = -k.radius; dy <= k.radius; ++dy) {
      const int row = (fh - dy) % fh;
      for (int dx = -k.radius; dx <= k.radius; ++dx) {
        const int col = (fw - dx) % fw;
        buf[static_cast<std::size_t>(row) * fw + col] = k.at(dx, dy);
      }
    }
    fftw_execute(forward.get());
    auto* s = spec.get();
    const auto* is = image_spec.get();
    for (std::size_t i = 0; i < cplx_n; ++i) {
      const double re = s[i][0] * is[i][0] - s[i][1] * is[i][1];
      const double im = s[i][0] * is[i][1] + s[i][1] * is[i][0];
      s[i][0] = re;
      s[i][1] = im;
    }
    fftw_execute(inverse.get());

    Plane<double> response(w, h);
    for (int y = 0; y < h; ++y) {
      const double* row = buf + static_cast<std::size_t>(y + radius) * fw + radius;
      for (int x = 0; x < w; ++x) response(x, y) = row[x] * scale;
    }
    out.push_back(std::move(response));
  }
  return out;
}

}  // namespace drfi
