#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mavi/estimation/eskf.hpp"
#include "mavi/estimation/gicp.hpp"
#include "mavi/estimation/imu_sim.hpp"
#include "mavi/estimation/relocalization.hpp"
#include "mavi/geometry/so3.hpp"
#include "synth_shapes.hpp"

using namespace mavi;

namespace {

// Room with a column and a crate, so every degree of freedom is observable.
PointCloud room(double spacing = 0.1) {
  PointCloud pc;
  synth::add_box(pc, {0, 0, 0}, {8, 6, 3}, spacing);
  synth::add_cylinder(pc, 2.5, 2.0, 0.3, 0, 3, spacing);
  synth::add_box(pc, {5.0, 3.5, 0}, {6.2, 4.3, 1.1}, spacing);
  return pc;
}

Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> n;
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

NominalState random_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  NominalState x;
  x.R = so3::exp(Vec3(u(rng), u(rng), u(rng)) * 2.0);
  x.p = Vec3(u(rng), u(rng), u(rng)) * 5;
  x.v = Vec3(u(rng), u(rng), u(rng)) * 2;
  x.b_w = Vec3(u(rng), u(rng), u(rng)) * 0.05;
  x.b_a = Vec3(u(rng), u(rng), u(rng)) * 0.2;
  x.b_g = Vec3(u(rng), u(rng), u(rng)) * 0.1;
  return x;
}

double min_eig(const Mat18& P) { return Eigen::SelfAdjointEigenSolver<Mat18>(P).eigenvalues().minCoeff(); }

}  // namespace

TEST_CASE("propagation examples") {
  EskfConfig cfg;
  Eskf f(cfg);
  NominalState x;
  x.p = Vec3(1, 2, 3);
  f.reset(x, Mat18::Identity() * 1e-4);
  ImuSample u;
  u.accel = -cfg.gravity;  // at rest, level: specific force opposes gravity
  for (int k = 0; k < 100; ++k) CHECK(f.propagate(u, 0.01));
  CHECK((f.state().p - x.p).norm() < 1e-12);
  CHECK(f.state().v.norm() < 1e-12);

  // Constant yaw rate pi for 1 s turns the body around.
  f.reset(NominalState{}, Mat18::Identity() * 1e-4);
  u.gyro = Vec3(0, 0, M_PI);
  double trace = f.covariance().trace();
  for (int k = 0; k < 100; ++k) {
    f.propagate(u, 0.01);
    CHECK(f.covariance().trace() > trace);
    trace = f.covariance().trace();
  }
  CHECK((f.state().R - so3::from_ypr(M_PI, 0, 0)).norm() < 1e-9);

  const NominalState before = f.state();
  u.accel.x() = std::nan("");
  CHECK_FALSE(f.propagate(u, 0.01));
  CHECK(f.state().p == before.p);
  u.accel.x() = 0;
  CHECK_FALSE(f.propagate(u, 0.05));
  CHECK_FALSE(f.propagate(u, 0.0));
}

TEST_CASE("propagation Jacobians match finite differences") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  const Vec3 g(0, 0, -9.81);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const NominalState x = random_state(rng);
    ImuSample m;
    m.gyro = Vec3(u(rng), u(rng), u(rng)) * 2;
    m.accel = Vec3(u(rng), u(rng), u(rng)) * 5 - g;
    const double dt = 0.005 + 0.015 * (u(rng) + 1) / 2;
    const PropagationJacobians J = propagation_jacobians(x, m, dt);
    const NominalState f0 = discrete_step(x, m, dt, g);

    for (int c = 0; c < 18; ++c) {
      Vec18 d = Vec18::Zero();
      d(c) = h;
      const Vec18 fd = (boxminus(discrete_step(boxplus(x, d), m, dt, g), f0) -
                        boxminus(discrete_step(boxplus(x, -d), m, dt, g), f0)) / (2 * h);
      const double err = (fd - J.Fx.col(c)).norm() / std::max(1.0, J.Fx.col(c).norm());
      worst = std::max(worst, err);
    }
    for (int c = 0; c < 15; ++c) {
      Vec15 w = Vec15::Zero();
      w(c) = h;
      const Vec18 fd = (boxminus(discrete_step(x, m, dt, g, w), f0) - boxminus(discrete_step(x, m, dt, g, -w), f0)) /
                       (2 * h);
      const double err = (fd - J.Fw.col(c)).norm() / std::max(1.0, J.Fw.col(c).norm());
      worst = std::max(worst, err);
    }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("noise-free figure-eight integration") {
  ImuSimConfig ic;
  const ImuStream s = simulate_imu(figure_eight(), 10.0, ic);
  Eskf f;
  NominalState x;
  x.R = s.truth[0].R, x.p = s.truth[0].p, x.v = s.truth[0].v;
  f.reset(x, Mat18::Identity() * 1e-6);
  for (const auto& m : s.samples) REQUIRE(f.propagate(m, 1.0 / ic.rate));
  CHECK((f.state().p - s.truth.back().p).norm() < 1e-2);
  CHECK((f.state().v - s.truth.back().v).norm() < 1e-6);
  CHECK(min_eig(f.covariance()) >= -1e-9);

  std::ostringstream os;
  write_imu_csv(os, s.samples);
  CHECK(os.str().rfind("t,wx,wy,wz,ax,ay,az\n", 0) == 0);
}

TEST_CASE("iterated update") {
  EskfConfig cfg;
  Eskf f(cfg);
  NominalState x;
  x.p = Vec3(1, 1, 1);
  f.reset(x, Mat18::Identity() * 1e-2);
  UpdateReport r = f.update(Pose::from(x.R, x.p));
  CHECK(r.applied);
  CHECK((f.state().p - x.p).norm() < 1e-15);
  CHECK(r.step_norms.front() == 0.0);

  // Loose prior (sigma 10 m), tight measurement (1 mm): scalar gain oracle.
  cfg.sigma_position = 1e-3;
  Eskf g(cfg);
  g.reset(x, Mat18::Identity() * 100.0);
  const Vec3 y = x.p + Vec3(1, 0, 0);
  g.update(Pose::from(x.R, y));
  const double k = 100.0 / (100.0 + 1e-6);
  CHECK(std::abs(g.state().p.x() - (x.p.x() + k)) < 1e-9);
  CHECK((g.state().p - y).norm() < 1e-2);
  CHECK(g.covariance()(kPos, kPos) == doctest::Approx(100.0 * 1e-6 / (100.0 + 1e-6)));

  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  int converged = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Eskf e{EskfConfig{}};
    const NominalState s = random_state(rng);
    e.reset(s, Mat18::Identity() * (0.01 + 0.5 * (u(rng) + 1)));
    const Pose meas = Pose::from(s.R * so3::exp(Vec3(u(rng), u(rng), u(rng)) * 0.3),
                                 s.p + Vec3(u(rng), u(rng), u(rng)));
    const UpdateReport rep = e.update(meas);
    CHECK(rep.iterations <= 10);
    if (rep.step_norms.back() < 0.1) ++converged;
    CHECK(min_eig(e.covariance()) >= -1e-9);
    CHECK(e.state().R.determinant() == doctest::Approx(1.0));
  }
  CHECK(converged == 100);
}

TEST_CASE("GICP examples") {
  const PointCloud map_cloud = room();
  GicpConfig cfg;
  const GicpMap map(map_cloud, cfg);
  REQUIRE(map.entries().size() == map_cloud.size());
  for (const auto& e : map.entries()) CHECK(e.info.norm() == doctest::Approx(cfg.weight));

  // On a flat patch the information concentrates on the normal.
  const auto* wall = map.nearest(Vec3(4.0, 0.0, 1.5), 0.1);
  REQUIRE(wall);
  CHECK(wall->info(1, 1) > 0.95);

  const GicpResult r0 = gicp_register(map_cloud, map, Pose::identity());
  CHECK(r0.ok);
  CHECK(r0.pose.translation.norm() < 1e-9);
  CHECK(r0.cost < 1e-12);

  const Pose shift = Pose::from(Mat3::Identity(), Vec3(0.2, 0, 0));
  const GicpResult r1 = gicp_register(map_cloud.transformed(shift.inverse()), map, Pose::identity());
  CHECK((r1.pose.translation - shift.translation).norm() < 1e-3);

  const Pose yaw = Pose::from(so3::from_ypr(5.0 * M_PI / 180, 0, 0), Vec3::Zero());
  const GicpResult r2 = gicp_register(map_cloud.transformed(yaw.inverse()), map, Pose::identity());
  CHECK(rotation_angle_between(r2.pose, yaw) * 180 / M_PI < 0.1);

  PointCloud few;
  for (int i = 0; i < 5; ++i) few.push_back(map_cloud.points[i * 100]);
  CHECK_FALSE(gicp_register(few, map, Pose::identity()).ok);
  CHECK_THROWS_AS(gicp_register(PointCloud{}, map, Pose::identity()), InvalidInput);
  GicpConfig bad;
  bad.lambda = 0;
  CHECK_THROWS_AS(GicpMap(map_cloud, bad), InvalidInput);
}

TEST_CASE("GICP recovers random transforms") {
  const PointCloud map_cloud = room();
  const GicpMap map(map_cloud, GicpConfig{});
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Pose truth = Pose::from(so3::exp(random_unit(rng) * u(rng) * 10.0 * M_PI / 180),
                                  random_unit(rng) * 0.5 * u(rng));
    const GicpResult r = gicp_register(map_cloud.transformed(truth.inverse()), map, Pose::identity());
    REQUIRE(r.ok);
    CHECK((r.pose.translation - truth.translation).norm() < 1e-3);
    CHECK(rotation_angle_between(r.pose, truth) * 180 / M_PI < 0.1);
  }
}

TEST_CASE("global relocalization") {
  const PointCloud prior = room(0.1);
  RelocalizationResult r = global_relocalize(prior, prior);
  CHECK(r.ok);
  CHECK(r.T_ex.translation.norm() < 1e-2);
  CHECK(rotation_angle_between(r.T_ex, Pose::identity()) < 1e-2);

  const Pose T = Pose::from(Mat3::Identity(), Vec3(1, 2, 0));
  r = global_relocalize(prior.transformed(T), prior);
  CHECK(r.ok);
  CHECK((r.T_ex.translation - T.translation).norm() < 1e-2);

  // Partial local map: half the room, rotated and shifted.
  std::vector<int> half;
  for (std::size_t i = 0; i < prior.size(); ++i)
    if (prior.points[i].x() < 4.5) half.push_back(static_cast<int>(i));
  const Pose T2 = Pose::from(so3::from_ypr(0.4, 0, 0), Vec3(-0.7, 0.3, 0.1));
  r = global_relocalize(prior.subset(half).transformed(T2), prior);
  CHECK(r.ok);
  CHECK((r.T_ex.translation - T2.translation).norm() < 1e-2);
  CHECK(rotation_angle_between(r.T_ex, T2) < 1e-2);

  PointCloud far;
  synth::add_box(far, {100, 100, 0}, {103, 102, 2}, 0.1);
  const Pose hint = Pose::from(Mat3::Identity(), Vec3(0.5, 0, 0));
  r = global_relocalize(far, prior, {}, &hint);
  CHECK_FALSE(r.ok);
  CHECK(r.T_ex.translation == hint.translation);

  Relocalizer reloc(prior);
  CHECK(reloc.maybe_update(0.0, prior.transformed(T)));
  CHECK(reloc.last_ok());
  CHECK_FALSE(reloc.maybe_update(4.9, far));
  CHECK(reloc.maybe_update(5.0, far));
  CHECK_FALSE(reloc.last_ok());
  CHECK((reloc.T_ex().translation - T.translation).norm() < 1e-2);
  CHECK(reloc.attempts() == 2);
}

TEST_CASE("noisy LiDAR-inertial run stays bounded") {
  const PointCloud map_cloud = room();
  GicpConfig gc;
  gc.voxel_size = 0.1;
  const GicpMap map(map_cloud, gc);
  const PointCloud body_base = voxel_downsample(map_cloud, 0.3);

  ImuSimConfig ic;
  ic.sigma_accel = 0.02;
  ic.sigma_gyro = 0.002;
  ic.seed = 4;
  const auto path = [](double t) {
    TruthSample s = figure_eight(2.5, 1.5, 20.0, 1.5)(t);
    s.p += Vec3(4, 3, 0);
    return s;
  };
  const ImuStream s = simulate_imu(path, 60.0, ic);

  Eskf f;
  NominalState x;
  x.R = s.truth[0].R, x.p = s.truth[0].p, x.v = s.truth[0].v;
  f.reset(x, Mat18::Identity() * 1e-4);
  std::mt19937 rng(8);
  std::normal_distribution<double> n(0.0, 0.01);
  double se = 0.0;
  int count = 0;
  const int every = static_cast<int>(ic.rate / 10);
  for (std::size_t k = 0; k < s.samples.size(); ++k) {
    f.propagate(s.samples[k], 1.0 / ic.rate);
    const TruthSample& t = s.truth[k + 1];
    if ((k + 1) % every == 0) {
      // Scan in the body frame with range noise.
      const Pose body = Pose::from(t.R, t.p);
      PointCloud scan = body_base.transformed(body.inverse());
      for (auto& p : scan.points) p += Vec3(n(rng), n(rng), n(rng));
      const GicpResult r = gicp_register(scan, map, f.pose());
      if (r.ok) f.update(r.pose);
      CHECK(min_eig(f.covariance()) >= -1e-9);
    }
    se += (f.state().p - t.p).squaredNorm();
    ++count;
  }
  CHECK(std::sqrt(se / count) < 0.2);
}
