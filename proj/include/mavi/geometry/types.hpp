#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mavi {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input violated a documented precondition.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(what) {}
};

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace mavi
