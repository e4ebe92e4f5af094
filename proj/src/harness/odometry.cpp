#include "mavi/harness/odometry.hpp"

#include <cmath>

#include "mavi/geometry/so3.hpp"

namespace mavi {

Mat3 sim_attitude(const MavSimState& s) { return so3::from_ypr(s.yaw, s.pitch, s.roll); }

EskfOdometry::EskfOdometry(const EstimationConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), filter_(cfg.eskf), rng_(seed) {}

Odometry EskfOdometry::operator()(const MavSimState& s, double t) {
  const Mat3 R = sim_attitude(s);
  const Vec3 g = cfg_.eskf.gravity;
  if (!started_) {
    NominalState x;
    x.R = R;
    x.p = s.position;
    x.v = s.velocity;
    Mat18 P = Mat18::Identity() * 1e-6;
    P.block<3, 3>(kPos, kPos) *= 1e2;
    filter_.reset(x, P);
    started_ = true;
    t_prev_ = t;
    next_fix_ = t + 1.0 / cfg_.fix_rate_hz;
    v_prev_ = s.velocity;
    R_prev_ = R;
    last_ = {s.position, s.velocity};
    return last_;
  }
  const double dt = t - t_prev_;
  if (!(dt > 0.0)) return last_;

  // Average acceleration and body rate over the step just taken.
  const Vec3 a_world = (s.velocity - v_prev_) / dt;
  ImuSample u;
  u.t = t_prev_;
  u.gyro = so3::log(R_prev_.transpose() * R) / dt;
  u.accel = R_prev_.transpose() * (a_world - g);
  if (cfg_.sigma_gyro > 0.0) u.gyro += cfg_.sigma_gyro * Vec3(N_(rng_), N_(rng_), N_(rng_));
  if (cfg_.sigma_accel > 0.0) u.accel += cfg_.sigma_accel * Vec3(N_(rng_), N_(rng_), N_(rng_));
  const int sub = std::max(1, static_cast<int>(std::ceil(dt / cfg_.eskf.max_dt - 1e-9)));
  for (int i = 0; i < sub; ++i) filter_.propagate(u, dt / sub);

  if (t + 1e-9 >= next_fix_) {
    next_fix_ += 1.0 / cfg_.fix_rate_hz;
    if (next_fix_ <= t) next_fix_ = t + 1.0 / cfg_.fix_rate_hz;
    const Vec3 dp = cfg_.fix_sigma_position * Vec3(N_(rng_), N_(rng_), N_(rng_));
    const Vec3 dr = cfg_.fix_sigma_rotation * Vec3(N_(rng_), N_(rng_), N_(rng_));
    filter_.update(Pose::from(R * so3::exp(dr), s.position + dp));
    ++updates_;
  }
  t_prev_ = t;
  v_prev_ = s.velocity;
  R_prev_ = R;
  last_ = {filter_.state().p, filter_.state().v};
  max_err_ = std::max(max_err_, (last_.position - s.position).norm());
  return last_;
}

std::function<Odometry(const MavSimState&, double)> make_eskf_odometry(const std::shared_ptr<EskfOdometry>& odo) {
  return [odo](const MavSimState& s, double t) { return (*odo)(s, t); };
}

LioTrace run_lidar_inertial(const World& world, const GicpMap& map, const TruthFn& truth, double duration,
                            const EstimationConfig& cfg, const LidarConfig& lidar, std::uint64_t seed) {
  ImuSimConfig ic;
  ic.rate = cfg.imu_rate;
  ic.sigma_gyro = cfg.sigma_gyro;
  ic.sigma_accel = cfg.sigma_accel;
  ic.gravity = cfg.eskf.gravity;
  ic.seed = static_cast<unsigned>(seed);
  const ImuStream imu = simulate_imu(truth, duration, ic);

  Eskf filter(cfg.eskf);
  NominalState x0;
  x0.R = imu.truth.front().R;
  x0.p = imu.truth.front().p;
  x0.v = imu.truth.front().v;
  filter.reset(x0, Mat18::Identity() * 1e-6);

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const int every = std::max(1, static_cast<int>(std::round(cfg.imu_rate / cfg.fix_rate_hz)));
  const double dt = 1.0 / cfg.imu_rate;
  LioTrace out;
  for (std::size_t k = 0; k < imu.samples.size(); ++k) {
    filter.propagate(imu.samples[k], dt);
    if ((k + 1) % every) continue;
    const TruthSample& ts = imu.truth[k + 1];
    const double yaw = std::atan2(ts.R(1, 0), ts.R(0, 0));
    const PointCloud hits = simulate_scan(world, ts.p, yaw, lidar, &rng);
    // Into the body frame, then thinned.
    const Pose T_wb = Pose::from(ts.R, ts.p);
    const PointCloud scan = voxel_downsample(hits.transformed(T_wb.inverse()), cfg.scan_voxel);
    const GicpResult reg = gicp_register(scan, map, filter.pose());
    if (reg.ok) {
      filter.update(reg.pose);
      ++out.updates;
    } else {
      ++out.registration_failures;
    }
    out.t.push_back(ts.t);
    out.truth.push_back(T_wb);
    out.estimate.push_back(filter.pose());
  }
  return out;
}

}  // namespace mavi
