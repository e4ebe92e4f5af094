#include "mavi/quality/mscn.hpp"

#include <opencv2/imgproc.hpp>

#include "mavi/geometry/types.hpp"

namespace mavi {

cv::Mat1d mscn(const GrayImage& img, double C) {
  img.validate();
  if (!(C > 0.0)) throw InvalidInput("MSCN constant must be positive");
  const cv::Size win(7, 7);
  const double s = 7.0 / 6.0;
  // Periodic borders: pad by the window radius, filter, crop.
  constexpr int r = 3;
  const int W = img.width(), H = img.height();
  if (W <= r || H <= r) throw InvalidInput("image too small for the MSCN window");
  cv::Mat1d padded, mu_p, mu2_p;
  cv::copyMakeBorder(img.pixels, padded, r, r, r, r, cv::BORDER_WRAP);
  cv::GaussianBlur(padded, mu_p, win, s, s, cv::BORDER_REFLECT_101);
  cv::GaussianBlur(padded.mul(padded), mu2_p, win, s, s, cv::BORDER_REFLECT_101);
  const cv::Rect inner(r, r, W, H);
  const cv::Mat1d mu = mu_p(inner), mu2 = mu2_p(inner);
  cv::Mat1d var = cv::abs(mu2 - mu.mul(mu));
  cv::Mat1d sigma;
  cv::sqrt(var, sigma);
  cv::Mat1d out;
  cv::divide(img.pixels - mu, sigma + C, out);
  return out;
}

}  // namespace mavi
