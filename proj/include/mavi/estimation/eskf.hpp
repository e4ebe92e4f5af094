#pragma once

#include <vector>

#include <Eigen/Core>

#include "mavi/geometry/pose.hpp"

namespace mavi {

using Mat18 = Eigen::Matrix<double, 18, 18>;
using Vec18 = Eigen::Matrix<double, 18, 1>;
using Mat18x15 = Eigen::Matrix<double, 18, 15>;
using Vec15 = Eigen::Matrix<double, 15, 1>;

struct ImuSample {
  Vec3 gyro = Vec3::Zero();   // omega_M, rad/s
  Vec3 accel = Vec3::Zero();  // a_M, specific force, m/s^2
  double t = 0.0;
};

/// Nominal state. The gravity actually applied is gravity0 + b_g.
struct NominalState {
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 b_w = Vec3::Zero();
  Vec3 b_a = Vec3::Zero();
  Vec3 b_g = Vec3::Zero();
};

/// Error-state blocks, in order.
enum EskfBlock : int { kTheta = 0, kPos = 3, kVel = 6, kBw = 9, kBa = 12, kBg = 15 };

/// x + dx with R Exp(dtheta) on the rotation.
NominalState boxplus(const NominalState& x, const Vec18& dx);
/// a - b, inverse of boxplus.
Vec18 boxminus(const NominalState& a, const NominalState& b);

/// Process noise standard deviations: gyro, accel, gyro bias walk, accel bias
/// walk, gravity correction walk.
struct EskfNoise {
  double n_w = 0.002;
  double n_a = 0.02;
  double n_bw = 1e-4;
  double n_ba = 1e-4;
  double n_bg = 1e-5;
};

/// One discrete IMU step with noise w = (n_w, n_a, n_bw, n_ba, n_bg) samples:
/// R' = R Exp((w_M - b_w - n_w) dt), v' = v + (R (a_M - b_a - n_a) + g) dt,
/// p' = p + v dt + (R (a_M - b_a - n_a) + g) dt^2 / 2, biases walk by n dt.
NominalState discrete_step(const NominalState& x, const ImuSample& u, double dt, const Vec3& gravity0,
                           const Vec15& w = Vec15::Zero());

struct PropagationJacobians {
  Mat18 Fx;
  Mat18x15 Fw;
};
/// Derivatives of discrete_step(x + dx, w) - discrete_step(x) at dx = 0, w = 0.
PropagationJacobians propagation_jacobians(const NominalState& x, const ImuSample& u, double dt);

struct EskfConfig {
  EskfNoise noise;
  Vec3 gravity = Vec3(0, 0, -9.81);
  double sigma_position = 0.02;  // pose measurement noise
  double sigma_rotation = 0.005;
  double epsilon = 0.1;          // iterated update stops when |dx| < epsilon
  int max_iterations = 10;
  double max_dt = 0.02;
};

struct UpdateReport {
  bool applied = false;
  int iterations = 0;
  std::vector<double> step_norms;
};

class Eskf {
 public:
  explicit Eskf(const EskfConfig& cfg = {});

  void reset(const NominalState& x, const Mat18& P);
  const NominalState& state() const { return x_; }
  const Mat18& covariance() const { return P_; }
  Pose pose() const { return Pose::from(x_.R, x_.p); }
  const EskfConfig& config() const { return cfg_; }

  /// Returns false (and leaves the state alone) for non-finite samples or
  /// dt outside (0, max_dt].
  bool propagate(const ImuSample& u, double dt);

  /// Iterated update with a pose observation y = (R, P).
  UpdateReport update(const Pose& y);

 private:
  EskfConfig cfg_;
  NominalState x_;
  Mat18 P_ = Mat18::Identity() * 1e-6;
};

}  // namespace mavi
