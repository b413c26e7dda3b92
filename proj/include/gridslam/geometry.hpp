#pragma once

#include <Eigen/Dense>

namespace gridslam {

using Vec3 = Eigen::Vector3d;

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  Aabb padded(double pad) const {
    return {min - Vec3::Constant(pad), max + Vec3::Constant(pad)};
  }
};

// Pinhole model, camera frame: +z forward, +x right, +y down.
// u = fx * x/z + cx, v = fy * y/z + cy.
struct Intrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  Vec3 backproject(double u, double v) const {
    return Vec3((u - cx) / fx, (v - cy) / fy, 1.0);
  }
  // Returns false when z <= 0.
  bool project(const Vec3& p_cam, double& u, double& v) const {
    if (p_cam.z() <= 0.0) return false;
    u = fx * p_cam.x() / p_cam.z() + cx;
    v = fy * p_cam.y() / p_cam.z() + cy;
    return true;
  }
  bool pixel_in_image(double u, double v, double margin = 0.0) const {
    return u >= -margin && u < width + margin && v >= -margin &&
           v < height + margin;
  }
};

}  // namespace gridslam
