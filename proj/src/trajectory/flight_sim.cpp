#include "mavi/trajectory/flight_sim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace mavi {

double FlightLog::rmse() const {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : samples) acc += (s.position - s.reference).squaredNorm();
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

double FlightLog::max_error() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, (s.position - s.reference).norm());
  return m;
}

FlightStepper::FlightStepper(const BSplineTrajectory& traj, const MavSimState& sim,
                             const FlightSimParams& params)
    : sim_(sim), params_(params), yaw0_(sim.yaw) {
  if (!(params.dt > 0.0) || params.dt > 0.01) throw InvalidInput("flight sim dt must be in (0, 0.01]");
  if (!(params.attitude_tau > 0.0)) throw InvalidInput("attitude lag must be positive");
  blend_ = 1.0 - std::exp(-params.dt / params.attitude_tau);
  set_trajectory(traj);
}

void FlightStepper::set_trajectory(const BSplineTrajectory& traj) {
  traj.validate();
  traj_ = traj;
  k_ = 0;
  const double total = traj_.duration() + std::max(0.0, params_.hold);
  steps_ = static_cast<long>(std::ceil(total / params_.dt));
}

FlightSample FlightStepper::step() {
  const double T = traj_.duration();
  const double t = time();
  const double tr = std::min(t, T);
  GoalState goal;
  goal.position = traj_.position(tr);
  if (t < T) {
    goal.velocity = traj_.velocity(tr);
    goal.acceleration = traj_.acceleration(tr);
  }
  goal.yaw = params_.yaw ? params_.yaw(t) : yaw0_;

  Odometry odom;
  if (params_.odometry) {
    odom = params_.odometry(sim_, t);
  } else {
    odom.position = sim_.position;
    odom.velocity = sim_.velocity;
  }
  const AttitudeCommand cmd = track_step(goal, odom, params_.gains, sim_.mass, sim_.gravity);

  sim_.pitch += blend_ * (cmd.pitch - sim_.pitch);
  sim_.roll += blend_ * (cmd.roll - sim_.roll);
  sim_.yaw = cmd.yaw;
  const double c = std::cos(sim_.yaw), s = std::sin(sim_.yaw), g = sim_.gravity;
  const Vec3 acc(g * (sim_.pitch * c + sim_.roll * s), g * (sim_.pitch * s - sim_.roll * c),
                 cmd.thrust / sim_.mass - g);

  FlightSample fs;
  fs.t = t;
  fs.reference = goal.position;
  fs.reference_velocity = goal.velocity;
  fs.position = sim_.position;
  fs.velocity = sim_.velocity;
  fs.acceleration = acc;
  fs.odom_position = odom.position;
  fs.pitch = sim_.pitch;
  fs.roll = sim_.roll;
  fs.yaw = sim_.yaw;
  fs.thrust = cmd.thrust;

  sim_.velocity += params_.dt * acc;
  sim_.position += params_.dt * sim_.velocity;
  ++k_;
  return fs;
}

FlightLog simulate_flight(const BSplineTrajectory& traj, MavSimState sim, const FlightSimParams& params) {
  FlightStepper stepper(traj, sim, params);
  FlightLog log;
  while (!stepper.done()) log.samples.push_back(stepper.step());
  return log;
}

void write_flight_csv(std::ostream& os, const FlightLog& log) {
  os << "t,ref_x,ref_y,ref_z,x,y,z,vx,vy,vz,pitch,roll,yaw,thrust\n";
  char buf[512];
  for (const auto& s : log.samples) {
    std::snprintf(buf, sizeof(buf), "%.4f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  s.t, s.reference.x(), s.reference.y(), s.reference.z(), s.position.x(), s.position.y(),
                  s.position.z(), s.velocity.x(), s.velocity.y(), s.velocity.z(), s.pitch, s.roll, s.yaw,
                  s.thrust);
    os << buf;
  }
}

}  // namespace mavi
