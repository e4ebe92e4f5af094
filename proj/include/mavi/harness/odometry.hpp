#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "mavi/estimation/eskf.hpp"
#include "mavi/estimation/gicp.hpp"
#include "mavi/estimation/imu_sim.hpp"
#include "mavi/exploration/lidar_sim.hpp"
#include "mavi/exploration/world.hpp"
#include "mavi/harness/config.hpp"
#include "mavi/trajectory/flight_sim.hpp"

namespace mavi {

/// Body attitude of the simulated vehicle.
Mat3 sim_attitude(const MavSimState& s);

/// Filter-in-the-loop odometry for the flight simulator. IMU samples are
/// synthesized from consecutive simulator states (plus white noise); pose
/// fixes at fix_rate_hz stand in for scan registration and carry Gaussian
/// position and rotation noise.
class EskfOdometry {
 public:
  EskfOdometry(const EstimationConfig& cfg, std::uint64_t seed);

  Odometry operator()(const MavSimState& s, double t);

  int updates() const { return updates_; }
  double max_position_error() const { return max_err_; }

 private:
  EstimationConfig cfg_;
  Eskf filter_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> N_{0.0, 1.0};
  bool started_ = false;
  double t_prev_ = 0.0;
  double next_fix_ = 0.0;
  Vec3 v_prev_ = Vec3::Zero();
  Mat3 R_prev_ = Mat3::Identity();
  Odometry last_;
  int updates_ = 0;
  double max_err_ = 0.0;
};

/// Copyable hook around a shared EskfOdometry.
std::function<Odometry(const MavSimState&, double)> make_eskf_odometry(const std::shared_ptr<EskfOdometry>& odo);

struct LioTrace {
  std::vector<double> t;
  std::vector<Pose> truth;
  std::vector<Pose> estimate;
  int updates = 0;
  int registration_failures = 0;
};

/// LiDAR-inertial odometry against a prior map: IMU propagation at the IMU
/// rate, scan-to-map registration seeded by the filter prediction at the fix
/// rate, and an iterated pose update with each registration.
LioTrace run_lidar_inertial(const World& world, const GicpMap& map, const TruthFn& truth, double duration,
                            const EstimationConfig& cfg, const LidarConfig& lidar, std::uint64_t seed);

}  // namespace mavi
