#pragma once

#include <cstdint>
#include <random>

#include "mavi/exploration/world.hpp"
#include "mavi/geometry/point_cloud.hpp"

namespace mavi {

/// Rotating dome scanner: full azimuth sweep, elevation fan from
/// elevation_min to elevation_max (degrees, spread over `channels` rings).
struct LidarConfig {
  double azimuth_step_deg = 2.0;
  int channels = 16;
  double elevation_min_deg = -7.0;
  double elevation_max_deg = 52.0;
  double range = 40.0;
  double rate_hz = 10.0;
  double noise_sigma = 0.0;  // range noise, m

  void validate() const;
};

/// Unit ray directions in the body frame (yaw applied by the caller).
std::vector<Vec3> lidar_directions(const LidarConfig& cfg);

/// World-frame hit points for a sensor at `origin` with heading `yaw`. Rays
/// that hit nothing within range produce no point. `rng` is needed only when
/// noise_sigma > 0.
PointCloud simulate_scan(const World& world, const Vec3& origin, double yaw, const LidarConfig& cfg,
                         std::mt19937_64* rng = nullptr);

}  // namespace mavi
