#pragma once

#include "mavi/estimation/gicp.hpp"

namespace mavi {

struct RelocalizationConfig {
  GicpConfig coarse{.voxel_size = 0.5, .max_iterations = 15, .max_correspondence = 2.0};
  GicpConfig fine{.voxel_size = 0.1, .max_correspondence = 0.5};
  double final_correspondence = 0.08;  // last refinement gate, drops non-overlapping points
  int refine_best = 4;                 // seeds kept after the coarse pass
  int yaw_candidates = 12;
  double inlier_distance = 0.15;
  double min_fitness = 0.25;  // inlier fraction of the prior sample
  double sample_voxel = 0.2;
  double period = 5.0;        // seconds between refreshes
};

struct RelocalizationResult {
  Pose T_ex;  // maps prior-map coordinates into the local map
  bool ok = false;
  double fitness = 0.0;
};

/// T_ex = argmin |M_mvs - T_ex M_prior|: yaw and centroid seeds (plus the
/// optional hint) run through coarse then fine GICP; the best inlier fraction wins.
/// On failure T_ex is the hint, or identity.
RelocalizationResult global_relocalize(const PointCloud& M_mvs, const PointCloud& M_prior,
                                       const RelocalizationConfig& cfg = {}, const Pose* hint = nullptr);

/// Keeps T_ex and refreshes it on a fixed cadence of simulated time.
class Relocalizer {
 public:
  explicit Relocalizer(const PointCloud& prior, const RelocalizationConfig& cfg = {});

  /// Recomputes T_ex when `period` has elapsed since the last attempt.
  /// Returns true when an attempt was made. A failed attempt keeps T_ex.
  bool maybe_update(double t, const PointCloud& local_map);

  const Pose& T_ex() const { return T_ex_; }
  bool last_ok() const { return last_ok_; }
  int attempts() const { return attempts_; }

 private:
  PointCloud prior_;
  RelocalizationConfig cfg_;
  Pose T_ex_;
  double last_t_ = 0.0;
  bool started_ = false;
  bool last_ok_ = false;
  int attempts_ = 0;
};

}  // namespace mavi
