#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "mavi/trajectory/bspline.hpp"
#include "mavi/trajectory/tracker.hpp"

namespace mavi {

struct MavSimState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double pitch = 0.0;
  double roll = 0.0;
  double yaw = 0.0;
  double mass = 1.5;
  double gravity = 9.81;
};

struct FlightSimParams {
  double dt = 0.005;
  double attitude_tau = 0.15;  // first-order lag of the attitude loop
  double hold = 1.0;           // seconds simulated after the trajectory ends
  TrackerGains gains;
  // Odometry fed to the tracker; perfect state when empty.
  std::function<Odometry(const MavSimState&, double)> odometry;
  // Commanded yaw over time; the initial yaw is held when empty.
  std::function<double(double)> yaw;
};

struct FlightSample {
  double t = 0.0;
  Vec3 reference = Vec3::Zero();
  Vec3 reference_velocity = Vec3::Zero();
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();  // world frame
  Vec3 odom_position = Vec3::Zero();
  double pitch = 0.0, roll = 0.0, yaw = 0.0, thrust = 0.0;
};

struct FlightLog {
  std::vector<FlightSample> samples;
  double rmse() const;       // position vs reference
  double max_error() const;
};

/// Step-wise version of simulate_flight, for loops that interleave sensing
/// and replanning with flight. The trajectory can be swapped mid-flight; its
/// clock restarts at zero.
class FlightStepper {
 public:
  FlightStepper(const BSplineTrajectory& traj, const MavSimState& sim, const FlightSimParams& params);

  /// Advances one dt and returns the sample taken at the start of the step.
  FlightSample step();
  /// True once the trajectory and the hold period have elapsed.
  bool done() const { return k_ > steps_; }
  void set_trajectory(const BSplineTrajectory& traj);

  const MavSimState& state() const { return sim_; }
  const BSplineTrajectory& trajectory() const { return traj_; }
  double time() const { return k_ * params_.dt; }  // since the current trajectory started

 private:
  BSplineTrajectory traj_;
  MavSimState sim_;
  FlightSimParams params_;
  double yaw0_ = 0.0;
  double blend_ = 0.0;
  long k_ = 0;
  long steps_ = 0;
};

/// Point-mass flight along the B-spline with the tracker in the loop.
/// Acceleration: g (theta cos psi + phi sin psi, theta sin psi - phi cos psi, u/(m g) - 1).
FlightLog simulate_flight(const BSplineTrajectory& traj, MavSimState sim, const FlightSimParams& params);

/// "t,ref_x,ref_y,ref_z,x,y,z,vx,vy,vz,pitch,roll,yaw,thrust"
void write_flight_csv(std::ostream& os, const FlightLog& log);

}  // namespace mavi
