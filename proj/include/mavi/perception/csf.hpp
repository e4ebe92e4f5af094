#pragma once

#include <span>

#include "mavi/geometry/point_cloud.hpp"
#include "mavi/perception/structure.hpp"

namespace mavi {

/// Cloth simulation parameters. Each particle obeys
///   m z'' = -m g + k * sum_j (z_j - z) - c z'
/// over its 4-neighbourhood, integrated with semi-implicit Euler.
struct CsfParams {
  double resolution = 0.5;
  double mass = 1.0;
  double gravity = 9.81;
  double spring = 19.62;
  double damping = 4.0;
  double time_step = 0.1;
  int iterations = 500;
  double threshold = 0.15;
  double settle_tol = 1e-4;

  void validate() const;
};

struct CsfResult {
  StructureInstance ground;
  int iterations = 0;
  int cols = 0;
  int rows = 0;
  std::vector<double> cloth;  // settled heights in the original frame, row-major
};

/// Drop a cloth onto the inverted cloud and keep the points that end up within
/// `threshold` of it. `indices` restricts the input (empty span = all points).
CsfResult extract_ground_csf(const PointCloud& cloud, const CsfParams& params = {},
                             std::span<const int> indices = {});

}  // namespace mavi
