#include "mavi/quality/synth_images.hpp"

#include <algorithm>
#include <cmath>

#include "mavi/geometry/types.hpp"

namespace mavi {

namespace {

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// Periodic value noise with `cells` lattice cells across the image.
void add_value_noise(GrayImage& img, int cells, double amp, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> lat(static_cast<std::size_t>(cells) * cells);
  for (auto& v : lat) v = u(rng);
  const int n = img.width();
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double fx = static_cast<double>(x) * cells / n, fy = static_cast<double>(y) * cells / n;
      const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
      const double tx = smooth(fx - x0), ty = smooth(fy - y0);
      auto L = [&](int i, int j) { return lat[static_cast<std::size_t>((j % cells) * cells + (i % cells))]; };
      const double a = L(x0, y0) + tx * (L(x0 + 1, y0) - L(x0, y0));
      const double b = L(x0, y0 + 1) + tx * (L(x0 + 1, y0 + 1) - L(x0, y0 + 1));
      img.at(x, y) += amp * (a + ty * (b - a));
    }
}

}  // namespace

GrayImage render_clean(int size, std::uint64_t seed) {
  if (size < 8) throw InvalidInput("render size must be at least 8");
  std::mt19937_64 rng(seed);
  GrayImage img(size, size, 0.0);
  for (int cells = 2; cells <= size / 2; cells *= 2) add_value_noise(img, cells, 2.0 / cells, rng);

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // Hard-edged discs and rectangles, drawn with wrap-around.
  const int shapes = 5 + static_cast<int>(u01(rng) * 6);
  for (int s = 0; s < shapes; ++s) {
    const double cx = u01(rng) * size, cy = u01(rng) * size;
    const double r = (0.05 + 0.15 * u01(rng)) * size;
    const double hw = (0.05 + 0.2 * u01(rng)) * size, hh = (0.05 + 0.2 * u01(rng)) * size;
    const double delta = (u01(rng) - 0.5) * 0.8;
    const bool disc = u01(rng) < 0.5;
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        double dx = std::abs(x + 0.5 - cx), dy = std::abs(y + 0.5 - cy);
        dx = std::min(dx, size - dx);
        dy = std::min(dy, size - dy);
        const bool in = disc ? dx * dx + dy * dy <= r * r : dx <= hw && dy <= hh;
        if (in) img.at(x, y) += delta;
      }
  }
  // Thin streaks, like joints or cracks. Integer directions keep the texture
  // tileable.
  static constexpr int kDirs[][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}};
  const int streaks = 2 + static_cast<int>(u01(rng) * 4);
  for (int s = 0; s < streaks; ++s) {
    const auto& d = kDirs[static_cast<int>(u01(rng) * 6) % 6];
    const double off = u01(rng) * size, delta = -0.2 - 0.3 * u01(rng);
    const double norm = std::hypot(d[0], d[1]);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        double t = std::fmod(d[0] * x + d[1] * y - off, static_cast<double>(size));
        if (t < 0) t += size;
        if (std::min(t, size - t) / norm < 0.8) img.at(x, y) += delta;
      }
  }

  double lo, hi;
  cv::minMaxLoc(img.pixels, &lo, &hi);
  img.pixels = 0.1 + 0.8 * (img.pixels - lo) / std::max(hi - lo, 1e-12);
  std::normal_distribution<double> nz(0.0, 0.01);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) img.at(x, y) = std::clamp(img.at(x, y) + nz(rng), 0.0, 1.0);
  return img;
}

GrayImage add_noise(const GrayImage& img, double sigma, std::mt19937_64& rng) {
  img.validate();
  if (sigma < 0.0) throw InvalidInput("noise sigma must be non-negative");
  GrayImage out(img.pixels.clone());
  std::normal_distribution<double> nz(0.0, sigma);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) out.at(x, y) = std::clamp(out.at(x, y) + nz(rng), 0.0, 1.0);
  return out;
}

std::vector<GrayImage> render_corpus(int count, int size, std::uint64_t seed) {
  std::vector<GrayImage> out;
  for (int i = 0; i < count; ++i) out.push_back(render_clean(size, seed + static_cast<std::uint64_t>(i)));
  return out;
}

}  // namespace mavi
