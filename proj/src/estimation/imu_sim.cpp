#include "mavi/estimation/imu_sim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include <Eigen/Geometry>

#include "mavi/geometry/so3.hpp"

namespace mavi {

TruthFn figure_eight(double ax, double ay, double period, double z0) {
  if (!(period > 0)) throw InvalidInput("period must be positive");
  return [=](double t) {
    const double w = 2.0 * M_PI / period;
    TruthSample s;
    s.t = t;
    s.p = Vec3(ax * std::sin(w * t), ay * std::sin(2 * w * t), z0 + 0.2 * std::sin(w * t));
    s.v = Vec3(ax * w * std::cos(w * t), 2 * ay * w * std::cos(2 * w * t), 0.2 * w * std::cos(w * t));
    s.R = so3::from_ypr(std::atan2(s.v.y(), s.v.x()), 0.0, 0.0);
    return s;
  };
}

ImuStream simulate_imu(const TruthFn& truth, double duration, const ImuSimConfig& cfg) {
  if (!(cfg.rate > 0) || !(duration > 0)) throw InvalidInput("IMU rate and duration must be positive");
  const double dt = 1.0 / cfg.rate;
  const int n = static_cast<int>(std::round(duration * cfg.rate));
  std::mt19937 rng(cfg.seed);
  std::normal_distribution<double> N(0.0, 1.0);
  auto noise = [&](double s) { return s > 0 ? Vec3(s * N(rng), s * N(rng), s * N(rng)) : Vec3::Zero(); };

  ImuStream out;
  out.truth.reserve(n + 1);
  for (int k = 0; k <= n; ++k) out.truth.push_back(truth(k * dt));
  out.samples.reserve(n);
  for (int k = 0; k < n; ++k) {
    const TruthSample& a = out.truth[k];
    const TruthSample& b = out.truth[k + 1];
    ImuSample s;
    s.t = a.t;
    s.gyro = so3::log(a.R.transpose() * b.R) / dt + cfg.gyro_bias + noise(cfg.sigma_gyro);
    s.accel = a.R.transpose() * ((b.v - a.v) / dt - cfg.gravity) + cfg.accel_bias + noise(cfg.sigma_accel);
    out.samples.push_back(s);
  }
  return out;
}

void write_imu_csv(std::ostream& os, const std::vector<ImuSample>& samples) {
  os << "t,wx,wy,wz,ax,ay,az\n";
  char buf[256];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f\n", s.t, s.gyro.x(), s.gyro.y(),
                  s.gyro.z(), s.accel.x(), s.accel.y(), s.accel.z());
    os << buf;
  }
}

void write_pose_csv_row(std::ostream& os, double t, const Pose& pose) {
  const Eigen::Quaterniond q(pose.rotation);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.9f,%.9f,%.9f,%.9f\n", t, pose.translation.x(),
                pose.translation.y(), pose.translation.z(), q.w(), q.x(), q.y(), q.z());
  os << buf;
}

}  // namespace mavi
