#pragma once

#include "mavi/geometry/types.hpp"

namespace mavi::so3 {

Mat3 skew(const Vec3& v);

/// Rodrigues exponential map.
Mat3 exp(const Vec3& phi);

/// Inverse of exp; returns the rotation vector with angle in [0, pi].
Vec3 log(const Mat3& R);

/// Right Jacobian Jr(phi) with Exp(phi + d) ~= Exp(phi) Exp(Jr(phi) d).
Mat3 right_jacobian(const Vec3& phi);

Mat3 right_jacobian_inv(const Vec3& phi);

/// Left Jacobian inverse, Jl^-1(phi) = Jr^-1(-phi).
Mat3 left_jacobian_inv(const Vec3& phi);

/// Project an almost-rotation back onto SO(3) (SVD).
Mat3 orthonormalize(const Mat3& R);

/// Z-Y-X Euler angles (yaw psi, pitch theta, roll phi) to rotation.
Mat3 from_ypr(double yaw, double pitch, double roll);

}  // namespace mavi::so3
