#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mavi/quality/image.hpp"
#include "mavi/quality/mscn.hpp"

namespace mavi {

/// Moments of one coefficient field: mean, variance, mean of cubes, and
/// E[x^4] / E[x^2]^2. Fields: the MSCN map, then its products with the
/// neighbour to the right, below, down-right and down-left.
inline constexpr int kNiqeFeatureDim = 20;

/// Natural-scene model: mean and covariance of per-patch features.
struct NsModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  int patch_size = 32;
  double C = kMscnC;

  /// Dimensions, symmetry and positive semi-definiteness.
  void validate() const;
};

NsModel load_ns_model(const std::string& path);
void save_ns_model(const std::string& path, const NsModel& model);

/// One feature row per non-overlapping patch (partial patches dropped).
std::vector<Eigen::VectorXd> patch_features(const GrayImage& img, int patch_size, double C = kMscnC);
/// Mean of the patch features. Throws InvalidInput if the image is smaller
/// than one patch.
Eigen::VectorXd image_features(const GrayImage& img, int patch_size, double C = kMscnC);

/// sqrt((x - mu)^T (Sigma + 1e-6 I)^-1 (x - mu)); throws Error when the
/// regularised covariance is not positive definite.
double mahalanobis_score(const Eigen::VectorXd& x, const NsModel& model);
double niqe(const GrayImage& img, const NsModel& model);

/// Mean and covariance of patch features over the images, using at most
/// `max_patches` patches taken in image order.
NsModel fit_ns_model(const std::vector<GrayImage>& images, int patch_size = 32, int max_patches = 500,
                     double C = kMscnC);

/// (score - lo) / (hi - lo) clamped to [0, 1]; throws InvalidInput when hi <= lo.
double niqe_normalize(double score, double lo, double hi);

struct FilterResult {
  std::vector<double> scores;
  std::vector<double> normalized;
  std::vector<bool> kept;
  int rejected_count() const;
};

/// Rejects images whose batch-normalised score exceeds s_dis. Degenerate
/// batches (one image, or all scores equal) keep everything.
FilterResult filter_dataset(const std::vector<GrayImage>& images, const NsModel& model, double s_dis);
FilterResult filter_scores(const std::vector<double>& scores, double s_dis);

/// Rows "file,niqe,niqe_norm,kept".
void write_filter_csv(std::ostream& os, const std::vector<std::string>& names, const FilterResult& r);

}  // namespace mavi
