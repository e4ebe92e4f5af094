#include "mavi/geometry/so3.hpp"

#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/SVD>

namespace mavi::so3 {

namespace {
constexpr double kSmallAngle = 1e-8;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Mat3 exp(const Vec3& phi) {
  const double angle = phi.norm();
  const Mat3 K = skew(phi);
  if (angle < kSmallAngle) {
    return Mat3::Identity() + K + 0.5 * K * K;
  }
  const double s = std::sin(angle) / angle;
  const double c = (1.0 - std::cos(angle)) / (angle * angle);
  return Mat3::Identity() + s * K + c * K * K;
}

Vec3 log(const Mat3& R) {
  // Quaternion route is stable near 0 and near pi.
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  const Vec3 v = q.vec();
  const double vn = v.norm();
  if (vn < kSmallAngle) {
    return 2.0 * v / q.w();
  }
  const double angle = 2.0 * std::atan2(vn, q.w());
  return angle * v / vn;
}

Mat3 right_jacobian(const Vec3& phi) {
  const double a = phi.norm();
  const Mat3 K = skew(phi);
  if (a < 1e-5) {
    return Mat3::Identity() - 0.5 * K + K * K / 6.0;
  }
  const double a2 = a * a;
  return Mat3::Identity() - (1.0 - std::cos(a)) / a2 * K +
         (a - std::sin(a)) / (a2 * a) * K * K;
}

Mat3 right_jacobian_inv(const Vec3& phi) {
  const double a = phi.norm();
  const Mat3 K = skew(phi);
  if (a < 1e-5) {
    return Mat3::Identity() + 0.5 * K + K * K / 12.0;
  }
  const double a2 = a * a;
  const double coeff = 1.0 / a2 - (1.0 + std::cos(a)) / (2.0 * a * std::sin(a));
  return Mat3::Identity() + 0.5 * K + coeff * K * K;
}

Mat3 left_jacobian_inv(const Vec3& phi) { return right_jacobian_inv(-phi); }

Mat3 orthonormalize(const Mat3& R) {
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0.0) {
    Mat3 U = svd.matrixU();
    U.col(2) *= -1.0;
    out = U * svd.matrixV().transpose();
  }
  return out;
}

Mat3 from_ypr(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
          Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

}  // namespace mavi::so3
