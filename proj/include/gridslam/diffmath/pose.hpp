#pragma once

#include <Eigen/Dense>

#include "gridslam/diffmath/ops.hpp"

namespace gridslam::diffmath {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Rigid camera-to-world transform, world_point = R * cam_point + t.
struct CameraPose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Vec3 apply(const Vec3& p_cam) const { return R * p_cam + t; }
  CameraPose inverse() const { return {R.transpose(), -(R.transpose() * t)}; }
  CameraPose compose(const CameraPose& rhs) const {
    return {R * rhs.R, R * rhs.t + t};
  }
  Eigen::Matrix4d matrix() const;
  static CameraPose from_matrix(const Eigen::Matrix4d& m);

  double rotation_drift() const;  // ||R^T R - I||_inf
};

Mat3 so3_exp(const Vec3& omega);
Vec3 so3_log(const Mat3& R);

// Left-increment retraction: R' = exp(w) R, t' = exp(w) t + u with
// delta = (w, u). The rotation is re-orthonormalized only when the drift
// exceeds 1e-12, so a zero delta is a bit-exact no-op.
CameraPose se3_retract(const CameraPose& pose, const Vec6& delta);

// Inverse of se3_retract: se3_retract(base, se3_log_delta(base, target))
// reproduces target.
Vec6 se3_log_delta(const CameraPose& base, const CameraPose& target);

// Differentiable pose: rotation/translation tensors as functions of a
// 6-vector tangent delta applied to a fixed base pose.
struct PoseGraph {
  Tensor rotation;     // [3,3]
  Tensor translation;  // [1,3]
};
PoseGraph pose_apply_delta(Tape* tape, const CameraPose& base,
                           const Tensor& delta6);

}  // namespace gridslam::diffmath
