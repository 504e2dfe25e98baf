#include "drfi/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "drfi/error.hpp"
#include "drfi/evaluation.hpp"

namespace drfi {
namespace {

void write_mat(const std::filesystem::path& path, const cv::Mat& mat) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat);
  } catch (const cv::Exception& e) {
    throw DataError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw DataError("cannot write " + path.string());
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw DataError("cannot decode image " + path.string());
  Image out(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) out(x, y) = Rgb{row[x][2], row[x][1], row[x][0]};
  }
  return out;
}

GrayMap read_gray(const std::filesystem::path& path) {
  const cv::Mat gray = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (gray.empty()) throw DataError("cannot decode grayscale image " + path.string());
  GrayMap out(gray.cols, gray.rows);
  for (int y = 0; y < gray.rows; ++y) {
    const auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < gray.cols; ++x) out(x, y) = row[x];
  }
  return out;
}

Mask read_mask(const std::filesystem::path& path) {
  Mask out = read_gray(path);
  for (auto& v : out) v = v > 127 ? 1 : 0;
  return out;
}

void write_image(const std::filesystem::path& path, const Image& image) {
  cv::Mat bgr(image.height(), image.width(), CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width(); ++x) {
      const Rgb& p = image(x, y);
      row[x] = cv::Vec3b(p.b, p.g, p.r);
    }
  }
  write_mat(path, bgr);
}

void write_gray(const std::filesystem::path& path, const GrayMap& map) {
  cv::Mat gray(map.height(), map.width(), CV_8UC1);
  for (int y = 0; y < map.height(); ++y) {
    auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < map.width(); ++x) row[x] = map(x, y);
  }
  write_mat(path, gray);
}

void write_saliency(const std::filesystem::path& path, const SaliencyMap& map) { write_gray(path, quantize(map)); }

}  // namespace drfi
