#pragma once

#include <vector>

#include "mavi/geometry/point_cloud.hpp"
#include "mavi/perception/structure.hpp"
#include "mavi/trajectory/flight_sim.hpp"

namespace mavi {

struct F1Score {
  int true_positives = 0;
  int predicted = 0;
  int truth = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// One-to-one matching of predicted to truth column centres (closest pairs
/// first) within `match_distance` in the horizontal plane.
F1Score eval_f1(const std::vector<Vec2>& predicted, const std::vector<Vec2>& truth, double match_distance);

/// Predicted centres are the column axes; truth centres are the horizontal
/// centroids of each column label in `cloud`.
F1Score eval_f1(const std::vector<StructureInstance>& columns, const PointCloud& cloud, double match_distance);

/// Horizontal centroid per truth column label, ordered by label.
std::vector<Vec2> truth_column_centers(const PointCloud& cloud);

/// Fraction of truth wall points (by label) that some extracted wall
/// contains. 1 when the cloud has no wall points.
double eval_wall_fraction(const std::vector<StructureInstance>& walls, const PointCloud& cloud);

struct TrackingStats {
  double ape_max = 0.0;
  double ape_rmse = 0.0;
  double rpe_max = 0.0;
  double rpe_rmse = 0.0;
  int samples = 0;
  int rpe_pairs = 0;
};

/// APE per sample against the time-matched reference. RPE pairs each sample
/// with the first one at least `window` seconds later and compares the
/// executed displacement with the reference displacement.
/// Throws InvalidInput on empty or mismatched inputs.
TrackingStats eval_tracking(const std::vector<double>& t, const std::vector<Vec3>& reference,
                            const std::vector<Vec3>& executed, double window = 1.0);
TrackingStats eval_tracking(const std::vector<FlightSample>& log, double window = 1.0);

}  // namespace mavi
