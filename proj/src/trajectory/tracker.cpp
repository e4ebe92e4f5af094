#include "mavi/trajectory/tracker.hpp"

#include <cmath>

namespace mavi {

AttitudeCommand track_step(const GoalState& goal, const Odometry& odom, const TrackerGains& gains,
                           double mass, double gravity) {
  if (!(mass > 0.0) || !(gravity > 0.0)) throw InvalidInput("mass and gravity must be positive");
  AttitudeCommand cmd;
  cmd.accel = goal.acceleration + gains.kd * (goal.velocity - odom.velocity) +
              gains.kp * (goal.position - odom.position);
  const double c = std::cos(goal.yaw), s = std::sin(goal.yaw);
  cmd.pitch = (c * cmd.accel.x() + s * cmd.accel.y()) / gravity;
  cmd.roll = (s * cmd.accel.x() - c * cmd.accel.y()) / gravity;
  cmd.yaw = goal.yaw;
  cmd.thrust = mass * (cmd.accel.z() + gravity);
  return cmd;
}

}  // namespace mavi
