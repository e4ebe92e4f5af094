#include "mavi/estimation/eskf.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <spdlog/spdlog.h>

#include "mavi/geometry/so3.hpp"

namespace mavi {

NominalState boxplus(const NominalState& x, const Vec18& dx) {
  NominalState y = x;
  y.R = x.R * so3::exp(dx.segment<3>(kTheta));
  y.p += dx.segment<3>(kPos);
  y.v += dx.segment<3>(kVel);
  y.b_w += dx.segment<3>(kBw);
  y.b_a += dx.segment<3>(kBa);
  y.b_g += dx.segment<3>(kBg);
  return y;
}

Vec18 boxminus(const NominalState& a, const NominalState& b) {
  Vec18 d;
  d.segment<3>(kTheta) = so3::log(b.R.transpose() * a.R);
  d.segment<3>(kPos) = a.p - b.p;
  d.segment<3>(kVel) = a.v - b.v;
  d.segment<3>(kBw) = a.b_w - b.b_w;
  d.segment<3>(kBa) = a.b_a - b.b_a;
  d.segment<3>(kBg) = a.b_g - b.b_g;
  return d;
}

NominalState discrete_step(const NominalState& x, const ImuSample& u, double dt, const Vec3& gravity0,
                           const Vec15& w) {
  const Vec3 omega = u.gyro - x.b_w - w.segment<3>(0);
  const Vec3 acc = x.R * (u.accel - x.b_a - w.segment<3>(3)) + gravity0 + x.b_g;
  NominalState y = x;
  y.R = so3::orthonormalize(x.R * so3::exp(omega * dt));
  y.p = x.p + x.v * dt + 0.5 * acc * dt * dt;
  y.v = x.v + acc * dt;
  y.b_w = x.b_w + w.segment<3>(6) * dt;
  y.b_a = x.b_a + w.segment<3>(9) * dt;
  y.b_g = x.b_g + w.segment<3>(12) * dt;
  return y;
}

PropagationJacobians propagation_jacobians(const NominalState& x, const ImuSample& u, double dt) {
  const Vec3 phi = (u.gyro - x.b_w) * dt;
  const Vec3 a = u.accel - x.b_a;
  const Mat3 I = Mat3::Identity();
  const Mat3 Jr = so3::right_jacobian(phi);
  const Mat3 Ra = x.R * so3::skew(a);
  const double dt2 = 0.5 * dt * dt;

  PropagationJacobians J;
  J.Fx.setIdentity();
  J.Fx.block<3, 3>(kTheta, kTheta) = so3::exp(phi).transpose();
  J.Fx.block<3, 3>(kTheta, kBw) = -Jr * dt;
  J.Fx.block<3, 3>(kPos, kTheta) = -Ra * dt2;
  J.Fx.block<3, 3>(kPos, kVel) = I * dt;
  J.Fx.block<3, 3>(kPos, kBa) = -x.R * dt2;
  J.Fx.block<3, 3>(kPos, kBg) = I * dt2;
  J.Fx.block<3, 3>(kVel, kTheta) = -Ra * dt;
  J.Fx.block<3, 3>(kVel, kBa) = -x.R * dt;
  J.Fx.block<3, 3>(kVel, kBg) = I * dt;

  J.Fw.setZero();
  J.Fw.block<3, 3>(kTheta, 0) = -Jr * dt;
  J.Fw.block<3, 3>(kPos, 3) = -x.R * dt2;
  J.Fw.block<3, 3>(kVel, 3) = -x.R * dt;
  J.Fw.block<3, 3>(kBw, 6) = I * dt;
  J.Fw.block<3, 3>(kBa, 9) = I * dt;
  J.Fw.block<3, 3>(kBg, 12) = I * dt;
  return J;
}

Eskf::Eskf(const EskfConfig& cfg) : cfg_(cfg) {
  if (!(cfg.max_dt > 0) || !(cfg.epsilon > 0) || cfg.max_iterations < 1) throw InvalidInput("bad ESKF config");
  if (!(cfg.sigma_position > 0) || !(cfg.sigma_rotation > 0)) throw InvalidInput("measurement noise must be positive");
}

void Eskf::reset(const NominalState& x, const Mat18& P) {
  x_ = x;
  P_ = 0.5 * (P + P.transpose());
}

bool Eskf::propagate(const ImuSample& u, double dt) {
  if (!u.gyro.allFinite() || !u.accel.allFinite() || !std::isfinite(dt)) return false;
  if (!(dt > 0.0) || dt > cfg_.max_dt) return false;
  const PropagationJacobians J = propagation_jacobians(x_, u, dt);
  Vec15 q;
  const EskfNoise& n = cfg_.noise;
  q << Vec3::Constant(n.n_w * n.n_w), Vec3::Constant(n.n_a * n.n_a), Vec3::Constant(n.n_bw * n.n_bw),
      Vec3::Constant(n.n_ba * n.n_ba), Vec3::Constant(n.n_bg * n.n_bg);
  x_ = discrete_step(x_, u, dt, cfg_.gravity);
  P_ = J.Fx * P_ * J.Fx.transpose() + J.Fw * q.asDiagonal() * J.Fw.transpose();
  P_ = 0.5 * (P_ + P_.transpose());
  return true;
}

UpdateReport Eskf::update(const Pose& y) {
  UpdateReport rep;
  using Mat6 = Eigen::Matrix<double, 6, 6>;
  using Mat6x18 = Eigen::Matrix<double, 6, 18>;
  using Mat18x6 = Eigen::Matrix<double, 18, 6>;
  using Vec6 = Eigen::Matrix<double, 6, 1>;

  Mat6 Rm = Mat6::Zero();
  Rm.diagonal() << Vec3::Constant(cfg_.sigma_rotation * cfg_.sigma_rotation),
      Vec3::Constant(cfg_.sigma_position * cfg_.sigma_position);

  const NominalState x0 = x_;
  NominalState xk = x0;
  Vec18 e = Vec18::Zero();
  Mat18x6 K;
  Mat6x18 H;
  for (int it = 0; it < cfg_.max_iterations; ++it) {
    Vec6 z;
    z.head<3>() = so3::log(xk.R.transpose() * y.rotation);
    z.tail<3>() = y.translation - xk.p;
    H.setZero();
    H.block<3, 3>(0, kTheta) = so3::left_jacobian_inv(z.head<3>());
    H.block<3, 3>(3, kPos).setIdentity();

    const Mat6 S = H * P_ * H.transpose() + Rm;
    Eigen::LLT<Mat6> llt(S);
    if (llt.info() != Eigen::Success) {
      spdlog::warn("ESKF update skipped: innovation covariance not positive definite");
      x_ = x0;
      rep.applied = false;
      return rep;
    }
    K = P_ * H.transpose() * llt.solve(Mat6::Identity());
    const Vec18 e_new = K * (z + H * e);
    const double step = (e_new - e).norm();
    e = e_new;
    xk = boxplus(x0, e);
    rep.step_norms.push_back(step);
    rep.iterations = it + 1;
    if (step < cfg_.epsilon) break;
  }
  x_ = xk;
  P_ = (Mat18::Identity() - K * H) * P_;
  P_ = 0.5 * (P_ + P_.transpose());
  rep.applied = true;
  return rep;
}

}  // namespace mavi
