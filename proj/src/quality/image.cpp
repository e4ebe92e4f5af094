#include "mavi/quality/image.hpp"

#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "mavi/geometry/types.hpp"

namespace mavi {

void GrayImage::validate() const {
  if (pixels.empty()) throw InvalidInput("empty image");
  if (!cv::checkRange(pixels)) throw InvalidInput("image has non-finite pixels");
}

GrayImage read_pgm(const std::string& path) {
  cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (m.empty()) throw Error("cannot read image " + path);
  cv::Mat1d out;
  m.convertTo(out, CV_64F, 1.0 / 255.0);
  return GrayImage(out);
}

void write_pgm(const std::string& path, const GrayImage& img) {
  img.validate();
  cv::Mat u8;
  img.pixels.convertTo(u8, CV_8U, 255.0);  // saturating, rounds to nearest
  if (!cv::imwrite(path, u8)) throw Error("cannot write image " + path);
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  img.validate();
  if (sigma <= 0.0) return GrayImage(img.pixels.clone());
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  cv::Mat1d out;
  cv::GaussianBlur(img.pixels, out, cv::Size(2 * radius + 1, 2 * radius + 1), sigma, sigma, cv::BORDER_REFLECT_101);
  return GrayImage(out);
}

GrayImage shift_wrap(const GrayImage& img, int dx, int dy) {
  img.validate();
  const int w = img.width(), h = img.height();
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(((x + dx) % w + w) % w, ((y + dy) % h + h) % h) = img.at(x, y);
  return out;
}

}  // namespace mavi
