#include "mavi/trajectory/bspline.hpp"

#include <algorithm>
#include <cmath>

namespace mavi {

namespace {

// Cardinal B-spline of degree q supported on [0, q+1).
double cardinal(int q, double x) {
  if (x < 0.0 || x >= q + 1) return 0.0;
  if (q == 0) return 1.0;
  return (x * cardinal(q - 1, x) + (q + 1 - x) * cardinal(q - 1, x - 1.0)) / q;
}

// Sum_i c_i M_q(s - i - offset) over the controls whose support holds s.
Vec3 evaluate(const std::vector<Vec3>& c, int q, double s, int offset) {
  Vec3 out = Vec3::Zero();
  const int lo = std::max(0, static_cast<int>(std::floor(s)) - q - offset);
  const int hi = std::min(static_cast<int>(c.size()) - 1, static_cast<int>(std::floor(s)) - offset);
  for (int i = lo; i <= hi; ++i) out += c[i] * cardinal(q, s - i - offset);
  return out;
}

std::vector<Vec3> differences(const std::vector<Vec3>& c, double dt) {
  std::vector<Vec3> d;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) d.push_back((c[i + 1] - c[i]) / dt);
  return d;
}

}  // namespace

void BSplineTrajectory::validate() const {
  if (degree < 1) throw InvalidInput("B-spline degree must be >= 1");
  if (static_cast<int>(control.size()) <= degree) throw InvalidInput("B-spline needs more than degree control points");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("B-spline knot interval must be positive");
  for (const auto& q : control)
    if (!all_finite(q)) throw InvalidInput("non-finite control point");
}

double BSplineTrajectory::duration() const {
  return (static_cast<double>(control.size()) - degree) * dt;
}

// Parameter s = degree + t/dt, clamped just inside the valid range.
static double param(const BSplineTrajectory& b, double t) {
  const double s_max = static_cast<double>(b.control.size());
  const double s = b.degree + std::clamp(t, 0.0, b.duration()) / b.dt;
  return std::min(s, std::nextafter(s_max, 0.0));
}

Vec3 BSplineTrajectory::position(double t) const { return evaluate(control, degree, param(*this, t), 0); }

Vec3 BSplineTrajectory::velocity(double t) const {
  if (degree < 1) return Vec3::Zero();
  return evaluate(differences(control, dt), degree - 1, param(*this, t), 1);
}

Vec3 BSplineTrajectory::acceleration(double t) const {
  if (degree < 2) return Vec3::Zero();
  return evaluate(differences(differences(control, dt), dt), degree - 2, param(*this, t), 2);
}

double BSplineTrajectory::arc_length(int per_span) const {
  const int n = std::max(1, per_span * static_cast<int>(control.size() - degree));
  const double T = duration();
  double len = 0.0;
  Vec3 prev = position(0.0);
  for (int k = 1; k <= n; ++k) {
    const Vec3 p = position(T * k / n);
    len += (p - prev).norm();
    prev = p;
  }
  return len;
}

BSplineTrajectory BSplineTrajectory::clamped(const std::vector<Vec3>& interior, double dt, int degree) {
  if (interior.empty()) throw InvalidInput("clamped B-spline needs at least one point");
  BSplineTrajectory b;
  b.dt = dt;
  b.degree = degree;
  for (int k = 0; k < degree - 1; ++k) b.control.push_back(interior.front());
  b.control.insert(b.control.end(), interior.begin(), interior.end());
  for (int k = 0; k < degree - 1; ++k) b.control.push_back(interior.back());
  return b;
}

ControlDynamics bspline_dynamics(const BSplineTrajectory& traj) {
  ControlDynamics d;
  d.v = differences(traj.control, traj.dt);
  d.a = differences(d.v, traj.dt);
  d.j = differences(d.a, traj.dt);
  return d;
}

}  // namespace mavi
