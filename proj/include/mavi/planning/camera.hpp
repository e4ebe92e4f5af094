#pragma once

namespace mavi {

/// Pinhole intrinsics in pixels plus the shooting distance D in metres.
struct CameraModel {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 320.0;
  double cy = 240.0;
  double distance = 1.5;

  void validate() const;
};

struct Fov {
  double theta_x = 0.0;  // rad
  double theta_y = 0.0;
  double width = 0.0;    // m, at the shooting distance
  double height = 0.0;
};

Fov compute_fov(const CameraModel& cam);

}  // namespace mavi
