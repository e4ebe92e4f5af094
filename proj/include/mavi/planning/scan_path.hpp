#pragma once

#include <iosfwd>
#include <vector>

#include "mavi/geometry/types.hpp"

namespace mavi {

struct Waypoint {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

enum class ScanPathKind { Spiral, Coverage };

struct ScanPath {
  std::vector<Waypoint> waypoints;
  int source_id = -1;
  ScanPathKind kind = ScanPathKind::Coverage;

  std::size_t size() const { return waypoints.size(); }
  double length() const;
  double max_spacing() const;
  /// Throws InvalidInput when there are fewer than 2 waypoints or non-finite values.
  void validate() const;
};

/// Rows "x,y,z,yaw".
void write_path_csv(std::ostream& os, const ScanPath& path);

double wrap_angle(double a);

}  // namespace mavi
