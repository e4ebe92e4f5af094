#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "mavi/estimation/eskf.hpp"

namespace mavi {

struct TruthSample {
  double t = 0.0;
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

/// Body pose and velocity as a function of time.
using TruthFn = std::function<TruthSample(double)>;

/// Figure-eight in the xy plane with yaw along the tangent and a small
/// vertical oscillation.
TruthFn figure_eight(double ax = 3.0, double ay = 1.5, double period = 10.0, double z0 = 1.0);

struct ImuSimConfig {
  double rate = 200.0;
  double sigma_gyro = 0.0;
  double sigma_accel = 0.0;
  Vec3 gyro_bias = Vec3::Zero();
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gravity = Vec3(0, 0, -9.81);
  unsigned seed = 1;
};

struct ImuStream {
  std::vector<ImuSample> samples;  // sample k drives the step from t_k to t_k+1
  std::vector<TruthSample> truth;  // truth at t_0 .. t_n
};

/// IMU samples consistent with the filter's discrete step: integrating them
/// without noise reproduces the truth velocity at every sample time and the
/// position up to the trapezoid error.
ImuStream simulate_imu(const TruthFn& truth, double duration, const ImuSimConfig& cfg);

/// "t,wx,wy,wz,ax,ay,az"
void write_imu_csv(std::ostream& os, const std::vector<ImuSample>& samples);
/// "t,x,y,z,qw,qx,qy,qz"
void write_pose_csv_row(std::ostream& os, double t, const Pose& pose);

}  // namespace mavi
