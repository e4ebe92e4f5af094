#include "mavi/planning/scan_path.hpp"

#include <cmath>
#include <ostream>

#include <cstdio>

namespace mavi {

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

double ScanPath::length() const {
  double s = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i)
    s += (waypoints[i].position - waypoints[i - 1].position).norm();
  return s;
}

double ScanPath::max_spacing() const {
  double s = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i)
    s = std::max(s, (waypoints[i].position - waypoints[i - 1].position).norm());
  return s;
}

void ScanPath::validate() const {
  if (waypoints.size() < 2) throw InvalidInput("scan path needs at least 2 waypoints");
  for (const auto& w : waypoints)
    if (!all_finite(w.position) || !std::isfinite(w.yaw)) throw InvalidInput("non-finite waypoint");
}

void write_path_csv(std::ostream& os, const ScanPath& path) {
  for (const auto& w : path.waypoints) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f\n", w.position.x(), w.position.y(),
                  w.position.z(), w.yaw);
    os << buf;
  }
}

}  // namespace mavi
