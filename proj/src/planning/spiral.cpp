#include "mavi/planning/spiral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mavi {

namespace {

Waypoint ring_point(const Vec2& c, double rs, double theta, double z) {
  Waypoint w;
  w.position = Vec3(c.x() + rs * std::cos(theta), c.y() + rs * std::sin(theta), z);
  w.yaw = wrap_angle(theta + M_PI);
  return w;
}

}  // namespace

SpiralPath gen_spiral_path(const Vec2& center, double radius, const CameraModel& cam, double h_min,
                           double h_max, int source_id) {
  if (!(h_max > h_min)) throw InvalidInput("spiral needs h_max > h_min");
  if (!(radius > 0.0)) throw InvalidInput("column radius must be positive");
  const Fov fov = compute_fov(cam);
  const double H = h_max - h_min;

  SpiralPath sp;
  sp.radius = radius + cam.distance;
  sp.per_turn = std::max(1, static_cast<int>(std::ceil(2.0 * M_PI * radius / fov.width - 1e-12)));
  const int m = sp.per_turn;
  sp.path.kind = ScanPathKind::Spiral;
  sp.path.source_id = source_id;
  auto& wp = sp.path.waypoints;

  if (fov.height >= H) {
    sp.turns = 1;
    sp.helix_begin = 0;
    for (int i = 0; i <= m; ++i) wp.push_back(ring_point(center, sp.radius, 2.0 * M_PI * i / m, 0.5 * (h_min + h_max)));
    sp.helix_count = wp.size();
    return sp;
  }

  const int n = static_cast<int>(std::ceil(H / fov.height - 1e-12));
  sp.turns = n;
  const double half_h = 0.5 * fov.height;
  const double eps = 1e-12 * std::max(1.0, std::abs(h_max));
  auto helix_z = [&](long i) { return H / (2.0 * M_PI * n) * (2.0 * M_PI * i / m) + h_min; };

  // Lead-in ring at h_min for angles whose lowest helix footprint starts above the band.
  for (int j = 1; j < m; ++j) {
    if (helix_z(j) - half_h > h_min + eps) wp.push_back(ring_point(center, sp.radius, 2.0 * M_PI * j / m, h_min));
  }
  sp.helix_begin = wp.size();
  for (long i = 0; i <= static_cast<long>(m) * n; ++i) {
    wp.push_back(ring_point(center, sp.radius, 2.0 * M_PI * i / m, helix_z(i)));
  }
  sp.helix_count = wp.size() - sp.helix_begin;
  // Lead-out ring at h_max, continuing past the end of the helix.
  for (int j = 1; j < m; ++j) {
    if (helix_z(static_cast<long>(m) * (n - 1) + j) + half_h < h_max - eps) {
      wp.push_back(ring_point(center, sp.radius, 2.0 * M_PI * j / m, h_max));
    }
  }
  return sp;
}

SpiralPath gen_spiral_path(const StructureInstance& column, const CameraModel& cam, double h_min,
                           double h_max, int source_id) {
  if (!column.axis) throw InvalidInput("column instance has no axis");
  return gen_spiral_path(column.axis->center, column.radius, cam, h_min, h_max, source_id);
}

double spiral_coverage(const ScanPath& path, const Vec2& center, double radius, const Fov& fov,
                       double h_min, double h_max, int samples, std::uint64_t seed, int* misses) {
  const double hw = std::min(fov.width / (2.0 * radius), M_PI) + 1e-9;
  const double hh = 0.5 * fov.height + 1e-9;
  std::vector<std::pair<double, double>> foot;
  foot.reserve(path.size());
  for (const auto& w : path.waypoints) {
    foot.emplace_back(std::atan2(w.position.y() - center.y(), w.position.x() - center.x()), w.position.z());
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(-M_PI, M_PI), uz(h_min, h_max);
  int miss = 0;
  for (int s = 0; s < samples; ++s) {
    const double phi = ua(rng), z = uz(rng);
    bool hit = false;
    for (const auto& [a, fz] : foot) {
      if (std::abs(wrap_angle(phi - a)) <= hw && std::abs(z - fz) <= hh) {
        hit = true;
        break;
      }
    }
    miss += !hit;
  }
  if (misses) *misses = miss;
  return samples > 0 ? 1.0 - static_cast<double>(miss) / samples : 1.0;
}

}  // namespace mavi
