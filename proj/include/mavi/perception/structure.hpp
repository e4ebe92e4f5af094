#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mavi/geometry/types.hpp"

namespace mavi {

enum class StructureKind { Ground, Roof, Column, Wall };

std::string to_string(StructureKind kind);

/// Plane n·x + d = 0 with unit normal n = (a, b, c).
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double d = 0.0;
  std::vector<int> inliers;

  double signed_distance(const Vec3& p) const { return normal.dot(p) + d; }
  double distance(const Vec3& p) const;
  bool is_normalized(double tol = 1e-9) const;
};

struct ColumnAxis {
  Vec2 center = Vec2::Zero();
  double z_min = 0.0;
  double z_max = 0.0;
};

struct StructureInstance {
  StructureKind kind = StructureKind::Ground;
  std::vector<int> indices;
  std::optional<ColumnAxis> axis;  // columns
  double radius = 0.0;             // columns
  std::optional<Plane> plane;      // walls, roof, ground
};

}  // namespace mavi
