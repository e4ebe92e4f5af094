#pragma once

#include <cstdint>

#include "mavi/perception/structure.hpp"
#include "mavi/planning/camera.hpp"
#include "mavi/planning/scan_path.hpp"

namespace mavi {

struct SpiralPath {
  ScanPath path;
  int turns = 0;            // n
  int per_turn = 0;         // m
  std::size_t helix_begin = 0;
  std::size_t helix_count = 0;  // m*n + 1
  double radius = 0.0;      // r + D
};

/// Helix around a column: m waypoints per turn, n turns between h_min and
/// h_max, yaw facing the axis. Constant-height rings are added at the bottom
/// and top only for angles whose lowest/highest helix footprint would miss the
/// band edge. A single mid-height circle is flown when FOV_h covers the band.
SpiralPath gen_spiral_path(const Vec2& center, double radius, const CameraModel& cam, double h_min,
                           double h_max, int source_id = -1);
SpiralPath gen_spiral_path(const StructureInstance& column, const CameraModel& cam, double h_min,
                           double h_max, int source_id = -1);

/// Fraction of random points on the lateral band [h_min, h_max] of the column
/// that fall inside at least one waypoint footprint (FOV_w x FOV_h wrapped onto
/// the surface). `misses` receives the number of uncovered samples.
double spiral_coverage(const ScanPath& path, const Vec2& center, double radius, const Fov& fov,
                       double h_min, double h_max, int samples, std::uint64_t seed,
                       int* misses = nullptr);

}  // namespace mavi
