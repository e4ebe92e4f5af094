#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mavi/harness/config.hpp"
#include "mavi/harness/evaluation.hpp"

namespace mavi {

enum class Stage { Gen, Segment, Plan, Explore, Estimate, Fly, Metrics, All };

Stage parse_stage(const std::string& s);
std::string to_string(Stage s);

struct PlannerRow {
  std::string scenario;
  bool obstacle = false;
  bool success = false;
  double distance = 0.0;   // D
  double length = 0.0;     // L_final
  double t_gen_ms = 0.0;   // T_G
  double t_opt_ms = 0.0;   // T_Opt
  double t_astar_ms = 0.0; // T_A*
};

struct TrackingRow {
  std::string path;  // "scan" or "curve"
  double speed = 0.0;
  TrackingStats stats;
};

struct ScanPlanRow {
  int id = -1;
  StructureKind kind = StructureKind::Column;
  bool planned = false;
  int waypoints = 0;
  double length = 0.0;
  double coverage = 0.0;  // sampled band coverage (columns) or free-cell coverage (walls)
  int misses = 0;
  std::string failure;
};

struct InspectionRow {
  int id = -1;
  StructureKind kind = StructureKind::Column;
  bool success = false;
  bool unreachable = false;
  int laps = 0;
  double alpha_final = 0.0;
  bool alpha_monotone = true;
  int violations = 0;
  int replaced_waypoints = 0;
  int replans = 0;
  int captures = 0;
  double planned_length = 0.0;
  double flown_length = 0.0;
  std::string failure;
};

struct EstimationStats {
  double duration = 0.0;
  int updates = 0;
  int registration_failures = 0;
  TrackingStats position;
  double rotation_rmse_deg = 0.0;
};

struct QualityStats {
  int images = 0;
  int corrupted = 0;
  int rejected = 0;
  int rejected_corrupted = 0;
  double clean_mean = 0.0;
  double corrupted_mean = 0.0;
};

struct EvalReport {
  std::string profile;
  std::uint64_t seed = 0;
  OdometrySource odometry = OdometrySource::Truth;
  std::vector<std::string> stages;
  std::optional<F1Score> columns;
  std::optional<double> wall_fraction;
  int walls_extracted = 0;
  std::vector<ScanPlanRow> scan_plans;
  std::vector<PlannerRow> planner;
  std::vector<InspectionRow> inspection;
  double mission_time = 0.0;
  int mission_violations = 0;
  std::optional<EstimationStats> estimation;
  std::vector<TrackingRow> tracking;
  std::optional<QualityStats> quality;
  std::vector<std::string> failures;    // stage failures, in order
  std::map<std::string, double> timing_ms;  // wall clock per stage

  int inspection_successes() const;
  double inspection_success_rate() const;  // 1 when nothing was inspected
};

/// Benchmark scenes: straight flights of each benchmark distance in free
/// space, then one through a wall-like obstacle halfway to the goal.
std::vector<PlannerRow> run_planner_benchmark(const PipelineConfig& cfg);
/// "scenario,success,D,L_final,T_G_ms,T_Opt_ms,T_Astar_ms"
void write_planner_csv(std::ostream& os, const std::vector<PlannerRow>& rows);

/// Report as JSON; timing fields live under "timing" and are omitted when
/// `with_timing` is false.
nlohmann::json report_to_json(const EvalReport& r, bool with_timing = true);

/// Runs the chain up to `stage` and writes its artifacts under run_dir:
/// scene.ply, instances.json, segmented.ply, paths/, grids/, logs/,
/// report.json. Metrics re-evaluates a run directory that already holds
/// scene.ply, segmented.ply, instances.json and tracking logs.
EvalReport run_pipeline(const PipelineConfig& cfg, const std::string& run_dir, Stage stage = Stage::All);
EvalReport run_pipeline(const std::string& config_path, const std::string& run_dir, Stage stage = Stage::All);

/// Metrics from the files of an existing run directory.
EvalReport evaluate_run_dir(const PipelineConfig& cfg, const std::string& run_dir);

}  // namespace mavi
