#include "mavi/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace mavi {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw InvalidInput("config key '" + path + "': " + what);
}

// Reads into or writes out of a config struct with one field list.
class Visitor {
 public:
  Visitor(json& j, bool reading, std::string prefix) : j_(j), reading_(reading), prefix_(std::move(prefix)) {
    if (reading_ && !j_.is_object()) bad(prefix_.empty() ? "<root>" : prefix_, "expected an object");
  }

  template <class T>
  void operator()(const char* key, T& v) {
    const std::string path = join(key);
    if (reading_) {
      seen_.insert(key);
      if (j_.contains(key)) read(j_[key], v, path);
    } else {
      write(j_[key], v);
    }
  }

  template <class F>
  void section(const char* key, F&& f) {
    const std::string path = join(key);
    if (reading_) {
      seen_.insert(key);
      if (!j_.contains(key)) return;
      Visitor sub(j_[key], true, path);
      f(sub);
      sub.finish();
    } else {
      j_[key] = json::object();
      Visitor sub(j_[key], false, path);
      f(sub);
    }
  }

  template <class T, class F>
  void list(const char* key, std::vector<T>& items, F&& f) {
    const std::string path = join(key);
    if (reading_) {
      seen_.insert(key);
      if (!j_.contains(key)) return;
      json& arr = j_[key];
      if (!arr.is_array()) bad(path, "expected an array");
      items.assign(arr.size(), T{});
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Visitor sub(arr[i], true, path + "[" + std::to_string(i) + "]");
        f(sub, items[i]);
        sub.finish();
      }
    } else {
      json arr = json::array();
      for (auto& it : items) {
        json o = json::object();
        Visitor sub(o, false, path);
        f(sub, it);
        arr.push_back(std::move(o));
      }
      j_[key] = std::move(arr);
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) bad(join(it.key().c_str()), "unknown key");
  }

 private:
  std::string join(const char* key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  static void read(const json& j, double& v, const std::string& p) {
    if (!j.is_number()) bad(p, "expected a number");
    v = j.get<double>();
  }
  static void read(const json& j, int& v, const std::string& p) {
    if (!j.is_number_integer()) bad(p, "expected an integer");
    v = j.get<int>();
  }
  static void read(const json& j, std::uint64_t& v, const std::string& p) {
    if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<long long>() < 0))
      bad(p, "expected a non-negative integer");
    v = j.get<std::uint64_t>();
  }
  static void read(const json& j, bool& v, const std::string& p) {
    if (!j.is_boolean()) bad(p, "expected true or false");
    v = j.get<bool>();
  }
  static void read(const json& j, std::string& v, const std::string& p) {
    if (!j.is_string()) bad(p, "expected a string");
    v = j.get<std::string>();
  }
  template <int N>
  static void read(const json& j, Eigen::Matrix<double, N, 1>& v, const std::string& p) {
    if (!j.is_array() || j.size() != N) bad(p, "expected an array of " + std::to_string(N) + " numbers");
    for (int i = 0; i < N; ++i) {
      if (!j[i].is_number()) bad(p, "expected numbers");
      v[i] = j[i].get<double>();
    }
  }
  static void read(const json& j, std::vector<double>& v, const std::string& p) {
    if (!j.is_array()) bad(p, "expected an array of numbers");
    v.clear();
    for (const auto& x : j) {
      if (!x.is_number()) bad(p, "expected numbers");
      v.push_back(x.get<double>());
    }
  }
  static void read(const json& j, OdometrySource& v, const std::string& p) {
    if (!j.is_string()) bad(p, "expected \"truth\" or \"eskf\"");
    try {
      v = parse_odometry(j.get<std::string>());
    } catch (const InvalidInput&) {
      bad(p, "expected \"truth\" or \"eskf\"");
    }
  }

  template <class T>
  static void write(json& j, const T& v) { j = v; }
  template <int N>
  static void write(json& j, const Eigen::Matrix<double, N, 1>& v) {
    j = json::array();
    for (int i = 0; i < N; ++i) j.push_back(v[i]);
  }
  static void write(json& j, const OdometrySource& v) { j = to_string(v); }

  json& j_;
  bool reading_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void visit(Visitor& v, PipelineConfig& c) {
  v("profile", c.profile);
  v("seed", c.seed);
  v("odometry", c.odometry);
  v.section("facility", [&](Visitor& f) {
    auto& s = c.facility;
    f("length", s.length);
    f("width", s.width);
    f("height", s.height);
    f.section("columns", [&](Visitor& g) {
      g("rows", s.columns.rows);
      g("cols", s.columns.cols);
      g("radius", s.columns.radius);
      g("spacing_x", s.columns.spacing_x);
      g("spacing_y", s.columns.spacing_y);
    });
    f.list("partitions", s.partitions, [](Visitor& g, PartitionSpec& p) {
      g("a", p.a);
      g("b", p.b);
      g("thickness", p.thickness);
    });
    f.list("obstacles", s.obstacles, [](Visitor& g, ObstacleSpec& o) {
      g("min", o.min);
      g("max", o.max);
    });
    f("noise_sigma", s.noise_sigma);
    f("point_spacing", s.point_spacing);
  });
  v.section("segmentation", [&](Visitor& s) {
    auto& p = c.segmentation;
    s.section("csf", [&](Visitor& g) {
      g("resolution", p.csf.resolution);
      g("mass", p.csf.mass);
      g("gravity", p.csf.gravity);
      g("spring", p.csf.spring);
      g("damping", p.csf.damping);
      g("time_step", p.csf.time_step);
      g("iterations", p.csf.iterations);
      g("threshold", p.csf.threshold);
      g("settle_tol", p.csf.settle_tol);
    });
    s.section("roof", [&](Visitor& g) {
      g("angle_tol", p.roof.angle_tol);
      g("dist_thresh", p.roof.dist_thresh);
      g("max_planes", p.roof.max_planes);
      g("min_inliers", p.roof.min_inliers);
      g("normal_angle", p.roof.normal_angle);
      g("seed", p.roof.seed);
    });
    s.section("columns", [&](Visitor& g) {
      g("aspect_max", p.columns.aspect_max);
      g("footprint_max", p.columns.footprint_max);
      g("height_min", p.columns.height_min);
      g("height_fraction", p.column_height_fraction);
    });
    s.section("walls", [&](Visitor& g) {
      g("dist_thresh", p.walls.dist_thresh);
      g("normal_angle", p.walls.normal_angle);
      g("kappa", p.walls.kappa);
      g("vertical_max", p.walls.vertical_max);
      g("min_inliers", p.walls.min_inliers);
      g("component_gap", p.walls.component_gap);
      g("hypotheses", p.walls.hypotheses);
      g("max_rounds", p.walls.max_rounds);
      g("seed", p.walls.seed);
    });
    s("cluster_dist", p.cluster_dist);
    s("surface_normal_angle", p.surface_normal_angle);
  });
  v.section("camera", [&](Visitor& g) {
    g("fx", c.camera.fx);
    g("fy", c.camera.fy);
    g("cx", c.camera.cx);
    g("cy", c.camera.cy);
    g("distance", c.camera.distance);
  });
  v.section("scan", [&](Visitor& g) {
    g("clearance", c.scan.clearance);
    g("coverage_samples", c.scan.coverage_samples);
  });
  v.section("planner", [&](Visitor& g) {
    auto& w = c.planner.weights;
    g("safe_distance", w.safe_distance);
    g("lambda_c", w.lambda_c);
    g("lambda_s", w.lambda_s);
    g("lambda_d", w.lambda_d);
    g("w_v", w.w_v);
    g("w_a", w.w_a);
    g("w_j", w.w_j);
    g("v_max", w.limits.v_max);
    g("a_max", w.limits.a_max);
    g("j_max", w.limits.j_max);
    g("literal_collision", w.literal_collision);
    g("cruise_speed", c.planner.cruise_speed);
    g("max_iterations", c.planner.max_iterations);
  });
  v.section("exploration", [&](Visitor& g) {
    auto& e = c.exploration;
    g("resolution", e.resolution);
    g("tau", e.tau);
    g("max_retries", e.max_retries);
    g("goals_per_column", e.goals_per_column);
    g("goal_margin", e.goal_margin);
    g("map_margin", e.map_margin);
    g("monitor_rate_hz", e.monitor_rate_hz);
    g("scan_speed", e.scan_speed);
    g("capture_tolerance", e.capture_tolerance);
    g("max_replans", e.max_replans);
    g("start", e.start);
    g("start_yaw", e.start_yaw);
    g.section("lidar", [&](Visitor& l) {
      l("azimuth_step_deg", e.lidar.azimuth_step_deg);
      l("channels", e.lidar.channels);
      l("elevation_min_deg", e.lidar.elevation_min_deg);
      l("elevation_max_deg", e.lidar.elevation_max_deg);
      l("range", e.lidar.range);
      l("rate_hz", e.lidar.rate_hz);
      l("noise_sigma", e.lidar.noise_sigma);
    });
  });
  v.section("tracking", [&](Visitor& g) {
    auto& t = c.tracking;
    g("kp", t.gains.kp);
    g("kd", t.gains.kd);
    g("dt", t.dt);
    g("attitude_tau", t.attitude_tau);
    g("scan_speed", t.scan_speed);
    g("speeds", t.speeds);
    g("rpe_window", t.rpe_window);
    g("curve_center", t.curve_center);
    g("curve_axes", t.curve_axes);
  });
  v.section("estimation", [&](Visitor& g) {
    auto& e = c.estimation;
    g("imu_rate", e.imu_rate);
    g("sigma_gyro", e.sigma_gyro);
    g("sigma_accel", e.sigma_accel);
    g("fix_rate_hz", e.fix_rate_hz);
    g("fix_sigma_position", e.fix_sigma_position);
    g("fix_sigma_rotation", e.fix_sigma_rotation);
    g("duration", e.duration);
    g("scan_voxel", e.scan_voxel);
    g.section("eskf", [&](Visitor& k) {
      k("n_w", e.eskf.noise.n_w);
      k("n_a", e.eskf.noise.n_a);
      k("n_bw", e.eskf.noise.n_bw);
      k("n_ba", e.eskf.noise.n_ba);
      k("n_bg", e.eskf.noise.n_bg);
      k("gravity", e.eskf.gravity);
      k("sigma_position", e.eskf.sigma_position);
      k("sigma_rotation", e.eskf.sigma_rotation);
      k("epsilon", e.eskf.epsilon);
      k("max_iterations", e.eskf.max_iterations);
      k("max_dt", e.eskf.max_dt);
    });
    g.section("gicp", [&](Visitor& k) {
      k("voxel_size", e.gicp.voxel_size);
      k("weight", e.gicp.weight);
      k("lambda", e.gicp.lambda);
      k("neighbors", e.gicp.neighbors);
      k("max_iterations", e.gicp.max_iterations);
      k("tolerance", e.gicp.tolerance);
      k("max_correspondence", e.gicp.max_correspondence);
    });
  });
  v.section("benchmark", [&](Visitor& g) {
    g("distances", c.benchmark.distances);
    g("obstacle_distance", c.benchmark.obstacle_distance);
    g("obstacle_size", c.benchmark.obstacle_size);
    g("resolution", c.benchmark.resolution);
  });
  v.section("quality", [&](Visitor& g) {
    auto& q = c.quality;
    g("s_dis", q.s_dis);
    g("C", q.C);
    g("patch_size", q.patch_size);
    g("image_size", q.image_size);
    g("images", q.images);
    g("corrupted", q.corrupted);
    g("blur_sigma", q.blur_sigma);
    g("model", q.model);
  });
}

}  // namespace

std::string to_string(OdometrySource s) { return s == OdometrySource::Eskf ? "eskf" : "truth"; }

OdometrySource parse_odometry(const std::string& s) {
  if (s == "truth") return OdometrySource::Truth;
  if (s == "eskf") return OdometrySource::Eskf;
  throw InvalidInput("odometry must be truth or eskf, got '" + s + "'");
}

PipelineConfig PipelineConfig::defaults(const std::string& profile) {
  PipelineConfig c;
  c.profile = profile;
  if (profile == "desk") {
    c.facility = FacilitySpec::desk();
  } else if (profile == "full") {
    c.facility = FacilitySpec::full();
    c.exploration.start = Vec3(2.0, 2.0, 2.0);
    c.tracking.curve_center = Vec3(44.0, 19.0, 2.5);
  } else {
    throw InvalidInput("profile must be desk or full, got '" + profile + "'");
  }
  c.estimation.gicp.voxel_size = 0.2;
  c.estimation.gicp.max_correspondence = 1.0;
  return c;
}

void PipelineConfig::validate() const {
  if (profile != "desk" && profile != "full") throw InvalidInput("profile must be desk or full");
  facility.validate();
  camera.validate();
  planner.weights.validate();
  exploration.lidar.validate();
  estimation.gicp.validate();
  if (!(scan.clearance >= 0.0) || 2.0 * scan.clearance >= facility.height)
    throw InvalidInput("scan clearance leaves no band between floor and roof");
  if (scan.coverage_samples < 0) throw InvalidInput("coverage samples must be non-negative");
  if (!(planner.cruise_speed > 0.0) || planner.max_iterations <= 0) throw InvalidInput("bad planner settings");
  const auto& e = exploration;
  if (!(e.resolution > 0.0) || !(e.tau > 0.0 && e.tau <= 1.0) || e.max_retries < 0 || e.goals_per_column < 1 ||
      !(e.scan_speed > 0.0) || !(e.monitor_rate_hz > 0.0) || e.max_replans < 0)
    throw InvalidInput("bad exploration settings");
  if (!(tracking.dt > 0.0) || !(tracking.scan_speed > 0.0) || !(tracking.rpe_window > 0.0))
    throw InvalidInput("bad tracking settings");
  if (!(tracking.curve_axes.minCoeff() > 0.0)) throw InvalidInput("tracking curve axes must be positive");
  for (double s : tracking.speeds)
    if (!(s > 0.0)) throw InvalidInput("tracking speeds must be positive");
  const auto& est = estimation;
  if (!(est.imu_rate > 0.0) || !(est.fix_rate_hz > 0.0) || !(est.duration > 0.0) || est.sigma_gyro < 0.0 ||
      est.sigma_accel < 0.0 || est.fix_sigma_position < 0.0 || est.fix_sigma_rotation < 0.0 || !(est.scan_voxel > 0.0))
    throw InvalidInput("bad estimation settings");
  if (!(benchmark.resolution > 0.0) || !(benchmark.obstacle_distance > 0.0) || !(benchmark.obstacle_size.minCoeff() > 0.0))
    throw InvalidInput("bad benchmark settings");
  for (double d : benchmark.distances)
    if (!(d > 0.0)) throw InvalidInput("benchmark distances must be positive");
  if (!(quality.s_dis > 0.0 && quality.s_dis <= 1.0)) throw InvalidInput("quality.s_dis must be in (0, 1]");
  if (quality.images < 0 || quality.corrupted < 0 || quality.patch_size < 8 || quality.image_size < quality.patch_size)
    throw InvalidInput("bad quality settings");
}

PipelineConfig parse_config(const json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  std::string profile = "desk";
  if (j.contains("profile")) {
    if (!j["profile"].is_string()) bad("profile", "expected a string");
    profile = j["profile"].get<std::string>();
  }
  PipelineConfig c;
  try {
    c = PipelineConfig::defaults(profile);
  } catch (const InvalidInput&) {
    bad("profile", "expected \"desk\" or \"full\"");
  }
  json copy = j;
  Visitor v(copy, true, "");
  visit(v, c);
  v.finish();
  c.validate();
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const PipelineConfig& cfg) {
  PipelineConfig c = cfg;
  json j = json::object();
  Visitor v(j, false, "");
  visit(v, c);
  return j;
}

}  // namespace mavi
