#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mavi/geometry/pose.hpp"
#include "mavi/geometry/types.hpp"

namespace mavi {

/// Positions in metres, with optional unit normals and integer labels that
/// match the points one to one when present.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<int> labels;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_labels() const { return !labels.empty(); }

  void push_back(const Vec3& p) { points.push_back(p); }
  void push_back(const Vec3& p, const Vec3& n) {
    points.push_back(p);
    normals.push_back(n);
  }
  void push_back(const Vec3& p, const Vec3& n, int label) {
    push_back(p, n);
    labels.push_back(label);
  }

  /// Checks finiteness, normal norms and attribute sizes.
  void validate() const;

  PointCloud subset(std::span<const int> indices) const;
  PointCloud transformed(const Pose& T) const;

  Vec3 centroid() const;
  /// Axis-aligned bounds; throws on empty cloud.
  std::pair<Vec3, Vec3> bounds() const;
};

}  // namespace mavi
