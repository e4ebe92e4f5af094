#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mavi/quality/image.hpp"

namespace mavi {

/// Tileable texture with a 1/f-like spectrum: octaves of periodic value
/// noise, hard-edged blobs and streaks, and light pixel noise, scaled into
/// [0.1, 0.9]. Deterministic in (size, seed).
GrayImage render_clean(int size, std::uint64_t seed);

/// Additive Gaussian noise, clamped to [0, 1].
GrayImage add_noise(const GrayImage& img, double sigma, std::mt19937_64& rng);

/// `count` clean renders with seeds seed, seed + 1, ...
std::vector<GrayImage> render_corpus(int count, int size, std::uint64_t seed);

}  // namespace mavi
