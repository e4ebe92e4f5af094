#pragma once

#include "mavi/quality/image.hpp"

namespace mavi {

inline constexpr double kMscnC = 1e-3;

/// Mean subtracted contrast normalised coefficients (I - mu) / (sigma + C),
/// with mu and sigma from a 7x7 Gaussian window (sigma_w = 7/6) and periodic
/// borders. Throws InvalidInput for C <= 0.
cv::Mat1d mscn(const GrayImage& img, double C = kMscnC);

}  // namespace mavi
