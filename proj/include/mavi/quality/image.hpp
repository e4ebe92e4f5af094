#pragma once

#include <string>

#include <opencv2/core.hpp>

#include "mavi/geometry/types.hpp"

namespace mavi {

/// Single-channel image with intensities in [0, 1].
struct GrayImage {
  cv::Mat1d pixels;

  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0) : pixels(height, width, fill) {}
  explicit GrayImage(cv::Mat1d m) : pixels(std::move(m)) {}

  int width() const { return pixels.cols; }
  int height() const { return pixels.rows; }
  double& at(int x, int y) { return pixels(y, x); }
  double at(int x, int y) const { return pixels(y, x); }

  /// Throws InvalidInput for an empty image or non-finite values.
  void validate() const;
};

/// 8-bit PGM. Reading scales to [0, 1]; writing clamps and rounds.
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& img);

/// Separable Gaussian blur, mirrored borders. sigma <= 0 returns a copy.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Circular shift by (dx, dy) pixels.
GrayImage shift_wrap(const GrayImage& img, int dx, int dy);

}  // namespace mavi
