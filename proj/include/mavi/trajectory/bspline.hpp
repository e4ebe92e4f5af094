#pragma once

#include <vector>

#include "mavi/geometry/types.hpp"

namespace mavi {

/// Uniform B-spline with knot interval dt. The curve is defined on
/// t in [0, (N - degree) * dt] for N control points.
struct BSplineTrajectory {
  std::vector<Vec3> control;
  double dt = 0.5;
  int degree = 3;

  /// Throws InvalidInput unless N > degree, dt > 0 and values are finite.
  void validate() const;
  double duration() const;

  Vec3 position(double t) const;
  Vec3 velocity(double t) const;
  Vec3 acceleration(double t) const;

  /// Arc length by dense sampling (`per_span` samples per knot interval).
  double arc_length(int per_span = 200) const;

  /// Control points for a curve that starts and ends at rest: the first and
  /// last points are repeated `degree` times.
  static BSplineTrajectory clamped(const std::vector<Vec3>& interior, double dt, int degree = 3);
};

/// Control-point differences: v_i = (Q_{i+1}-Q_i)/dt, a_i = (v_{i+1}-v_i)/dt,
/// j_i = (a_{i+1}-a_i)/dt.
struct ControlDynamics {
  std::vector<Vec3> v, a, j;
};
ControlDynamics bspline_dynamics(const BSplineTrajectory& traj);

}  // namespace mavi
