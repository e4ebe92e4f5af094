#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mavi/estimation/eskf.hpp"
#include "mavi/estimation/gicp.hpp"
#include "mavi/exploration/inspection.hpp"
#include "mavi/harness/facility.hpp"
#include "mavi/perception/segmentation.hpp"
#include "mavi/planning/camera.hpp"
#include "mavi/trajectory/cost.hpp"

namespace mavi {

enum class OdometrySource { Truth, Eskf };

struct ScanConfig {
  double clearance = 1.0;       // scan band keeps this far from floor and roof
  int coverage_samples = 10000;
};

struct PlannerConfig {
  OptWeights weights;
  double cruise_speed = 1.0;
  int max_iterations = 200;
};

struct ExplorationConfig {
  double resolution = 0.2;
  double tau = 0.95;
  int max_retries = 3;
  int goals_per_column = 6;
  double goal_margin = 0.5;
  double map_margin = 6.0;
  double monitor_rate_hz = 2.0;
  double scan_speed = 0.5;
  double capture_tolerance = 0.3;
  int max_replans = 3;
  Vec3 start = Vec3(1.5, 1.5, 1.5);
  double start_yaw = 0.0;
  LidarConfig lidar;
};

struct TrackingConfig {
  TrackerGains gains;
  double dt = 0.005;
  double attitude_tau = 0.15;
  double scan_speed = 0.5;
  std::vector<double> speeds = {1.0, 1.75, 2.5};
  double rpe_window = 1.0;
  // Closed elliptical test curve flown at each speed.
  Vec3 curve_center = Vec3(10.0, 6.0, 2.0);
  Vec2 curve_axes = Vec2(3.0, 3.5);
};

struct EstimationConfig {
  double imu_rate = 200.0;
  double sigma_gyro = 0.002;
  double sigma_accel = 0.02;
  double fix_rate_hz = 10.0;           // pose fixes fed to the in-loop filter
  double fix_sigma_position = 0.02;
  double fix_sigma_rotation = 0.005;
  double duration = 20.0;              // estimate stage
  EskfConfig eskf;
  GicpConfig gicp;
  double scan_voxel = 0.3;
};

struct BenchmarkConfig {
  std::vector<double> distances = {2.0, 4.0, 6.0};
  double obstacle_distance = 6.0;
  Vec3 obstacle_size = Vec3(0.4, 3.0, 4.0);  // centred between start and goal
  double resolution = 0.1;
};

struct QualityConfig {
  double s_dis = 0.8;
  double C = 1e-3;
  int patch_size = 32;
  int image_size = 128;
  int images = 10;
  int corrupted = 2;
  double blur_sigma = 4.0;
  std::string model;  // empty: the bundled model, fitted on the fly when missing
};

struct PipelineConfig {
  std::string profile = "desk";
  std::uint64_t seed = 1;
  OdometrySource odometry = OdometrySource::Truth;
  FacilitySpec facility;
  SegmentationParams segmentation;
  CameraModel camera;
  ScanConfig scan;
  PlannerConfig planner;
  ExplorationConfig exploration;
  TrackingConfig tracking;
  EstimationConfig estimation;
  BenchmarkConfig benchmark;
  QualityConfig quality;

  /// Defaults for a profile ("desk" or "full").
  static PipelineConfig defaults(const std::string& profile);
  void validate() const;
};

/// Strict parse: every key must be known (errors name the full key path);
/// missing keys keep the profile defaults. The "profile" key, when present,
/// selects the defaults before anything else is read.
PipelineConfig parse_config(const nlohmann::json& j);
PipelineConfig load_config(const std::string& path);
nlohmann::json config_to_json(const PipelineConfig& cfg);

std::string to_string(OdometrySource s);
OdometrySource parse_odometry(const std::string& s);

}  // namespace mavi
