#pragma once

#include "mavi/quality/image.hpp"

namespace mavi {

/// 10 log10(1 / MSE) for images on [0, 1]; +infinity when identical.
/// Throws InvalidInput on a size mismatch.
double psnr(const GrayImage& a, const GrayImage& b);

}  // namespace mavi
