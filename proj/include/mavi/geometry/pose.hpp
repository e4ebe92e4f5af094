#pragma once

#include "mavi/geometry/types.hpp"

namespace mavi {

/// Rigid transform x -> R x + t.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose from(const Mat3& R, const Vec3& t) { return {R, t}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }
  Pose operator*(const Pose& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }

  /// Throws InvalidInput if the rotation is not in SO(3) within 1e-6.
  void validate() const;
  bool is_valid(double tol = 1e-6) const;
};

/// Rotation angle (rad) of a.rotation^T b.rotation.
double rotation_angle_between(const Pose& a, const Pose& b);

}  // namespace mavi
