#include "mavi/planning/camera.hpp"

#include <cmath>

#include "mavi/geometry/types.hpp"

namespace mavi {

void CameraModel::validate() const {
  if (!(fx > 0 && fy > 0 && cx > 0 && cy > 0 && distance > 0) ||
      !std::isfinite(fx + fy + cx + cy + distance)) {
    throw InvalidInput("camera intrinsics and shooting distance must be positive");
  }
}

Fov compute_fov(const CameraModel& cam) {
  cam.validate();
  Fov f;
  f.theta_x = 2.0 * std::atan(cam.cx / cam.fx);
  f.theta_y = 2.0 * std::atan(cam.cy / cam.fy);
  f.width = 2.0 * cam.distance * std::tan(f.theta_x / 2.0);
  f.height = 2.0 * cam.distance * std::tan(f.theta_y / 2.0);
  return f;
}

}  // namespace mavi
