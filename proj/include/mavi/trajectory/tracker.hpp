#pragma once

#include "mavi/geometry/types.hpp"

namespace mavi {

struct TrackerGains {
  double kp = 6.0;
  double kd = 4.0;
};

struct GoalState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double yaw = 0.0;
};

struct Odometry {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct AttitudeCommand {
  double pitch = 0.0;   // theta
  double roll = 0.0;    // phi
  double yaw = 0.0;     // psi
  double thrust = 0.0;  // u
  Vec3 accel = Vec3::Zero();  // commanded acceleration
};

/// PD with acceleration feed-forward, then the small-angle attitude/thrust map.
AttitudeCommand track_step(const GoalState& goal, const Odometry& odom, const TrackerGains& gains,
                           double mass, double gravity);

}  // namespace mavi
