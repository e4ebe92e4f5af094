#include "mavi/exploration/lidar_sim.hpp"

#include <cmath>
#include <numbers>

namespace mavi {

void LidarConfig::validate() const {
  if (!(azimuth_step_deg > 0.0) || azimuth_step_deg > 360.0) throw InvalidInput("lidar azimuth step out of range");
  if (channels < 1) throw InvalidInput("lidar needs at least one channel");
  if (!(elevation_max_deg >= elevation_min_deg) || elevation_min_deg < -90.0 || elevation_max_deg > 90.0)
    throw InvalidInput("lidar elevation range invalid");
  if (!(range > 0.0) || !(rate_hz > 0.0) || noise_sigma < 0.0) throw InvalidInput("lidar range, rate or noise invalid");
}

std::vector<Vec3> lidar_directions(const LidarConfig& cfg) {
  cfg.validate();
  constexpr double deg = std::numbers::pi / 180.0;
  const int n_az = std::max(1, static_cast<int>(std::lround(360.0 / cfg.azimuth_step_deg)));
  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(n_az) * cfg.channels);
  for (int c = 0; c < cfg.channels; ++c) {
    const double el = cfg.channels == 1
                          ? cfg.elevation_min_deg
                          : cfg.elevation_min_deg + (cfg.elevation_max_deg - cfg.elevation_min_deg) * c / (cfg.channels - 1);
    const double ce = std::cos(el * deg), se = std::sin(el * deg);
    for (int a = 0; a < n_az; ++a) {
      const double az = 2.0 * std::numbers::pi * a / n_az;
      dirs.emplace_back(ce * std::cos(az), ce * std::sin(az), se);
    }
  }
  return dirs;
}

PointCloud simulate_scan(const World& world, const Vec3& origin, double yaw, const LidarConfig& cfg,
                         std::mt19937_64* rng) {
  if (cfg.noise_sigma > 0.0 && rng == nullptr) throw InvalidInput("noisy lidar needs a random generator");
  const auto dirs = lidar_directions(cfg);
  const double c = std::cos(yaw), s = std::sin(yaw);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
  PointCloud out;
  out.points.reserve(dirs.size());
  for (const auto& b : dirs) {
    const Vec3 d(c * b.x() - s * b.y(), s * b.x() + c * b.y(), b.z());
    const auto hit = world.raycast(origin, d, cfg.range);
    if (!hit) continue;
    double r = hit->distance;
    if (cfg.noise_sigma > 0.0) r = std::max(0.0, r + noise(*rng));
    out.points.push_back(origin + r * d);
  }
  return out;
}

}  // namespace mavi
