#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <span>

namespace hoi {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Rigid map x -> R x + t.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }

  RigidTransform compose(const RigidTransform& inner) const {
    return {rotation * inner.rotation, rotation * inner.translation + translation};
  }

  RigidTransform inverse() const {
    const Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }
};

// Rodrigues. A zero vector maps to the exact identity.
Mat3 axis_angle_to_matrix(const Vec3& axis_angle);
Quat axis_angle_to_quat(const Vec3& axis_angle);
// Returns the rotation vector with angle in [0, pi].
Vec3 quat_to_axis_angle(const Quat& q);
Vec3 matrix_to_axis_angle(const Mat3& r);

// Shortest-arc spherical interpolation.
Quat slerp_shortest(const Quat& a, const Quat& b, double t);

// Cascade summation; error grows O(log n) rather than O(n).
double pairwise_sum(std::span<const double> values);
double pairwise_mean(std::span<const double> values);

inline double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }

}  // namespace hoi
