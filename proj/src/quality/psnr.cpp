#include "mavi/quality/psnr.hpp"

#include <cmath>
#include <limits>

#include "mavi/geometry/types.hpp"

namespace mavi {

double psnr(const GrayImage& a, const GrayImage& b) {
  a.validate();
  b.validate();
  if (a.width() != b.width() || a.height() != b.height()) throw InvalidInput("PSNR needs images of equal size");
  double acc = 0.0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      const double d = a.at(x, y) - b.at(x, y);
      acc += d * d;
    }
  if (acc == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = acc / (static_cast<double>(a.width()) * a.height());
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace mavi
