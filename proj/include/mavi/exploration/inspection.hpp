#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mavi/exploration/exploration.hpp"
#include "mavi/exploration/lidar_sim.hpp"
#include "mavi/exploration/world.hpp"
#include "mavi/trajectory/flight_sim.hpp"
#include "mavi/trajectory/planner.hpp"

namespace mavi {

struct InspectionTask {
  ExplorationTarget target;
  ScanPath path;
};

struct InspectionConfig {
  double resolution = 0.2;       // task map and ground-truth grid
  double tau = 0.95;
  int max_retries = 3;           // height-shifted laps after the first
  double map_margin = 6.0;       // task map extends this far around the region
  GoalParams goals;
  LidarConfig lidar;
  double monitor_rate_hz = 2.0;  // scans while flying the scan path
  PlannerParams transit;         // moves between goals
  double scan_speed = 0.5;
  FlightSimParams flight;
  double capture_tolerance = 0.3;
  int max_replans = 3;
  Vec3 start = Vec3(0.0, 0.0, 1.0);
  double start_yaw = 0.0;
  std::uint64_t seed = 1;
  int log_every = 10;            // keep every n-th flight sample in the report
  // Odometry for the tracker on the mission clock; ground truth when empty.
  std::function<Odometry(const MavSimState&, double)> odometry;

  void validate() const;
};

struct CapturePose {
  int waypoint = -1;       // index in the reference scan path
  Waypoint pose;           // where the camera was at its closest approach
  double error = 0.0;      // distance to the reference waypoint
  bool reached = false;
};

struct InstanceReport {
  int id = -1;
  StructureKind kind = StructureKind::Column;
  bool success = false;
  bool unreachable = false;
  std::vector<double> alpha_history;  // after every lap
  bool alpha_monotone = true;         // checked after every scan
  double alpha_final = 0.0;
  int laps = 0;
  double exploration_distance = 0.0;  // flown during laps
  double planned_scan_length = 0.0;   // repaired reference path
  double scan_length = 0.0;           // flown while executing it
  int replaced_waypoints = 0;
  int replans = 0;
  int violations = 0;                 // samples inside ground-truth obstacle voxels
  std::vector<CapturePose> captures;
  ScanPath executed_path;             // repaired path that was flown
  std::string failure;
};

struct InspectionReport {
  std::vector<InstanceReport> instances;
  std::vector<FlightSample> trajectory;  // mission clock, thinned by log_every
  double mission_time = 0.0;
  int violations = 0;
  int successes() const;
};

/// Explore, repair and fly every task in order. `prior` holds the known
/// structure as obstacle voxels at the config resolution; `world` is the
/// ground truth used for sensing and the post-hoc intrusion check.
InspectionReport run_inspection(const std::vector<InspectionTask>& tasks, const World& world,
                                const VoxelGrid& prior, const InspectionConfig& cfg);

/// Prior obstacle voxels from a point cloud.
VoxelGrid prior_grid(const PointCloud& cloud, double resolution);

/// "t,x,y,z,yaw,ref_x,ref_y,ref_z"
void write_trajectory_csv(std::ostream& os, const std::vector<FlightSample>& samples);

}  // namespace mavi
