#pragma once

#include "gridslam/diffmath/pose.hpp"
#include "gridslam/geometry.hpp"

namespace gridslam::render {

using diffmath::CameraPose;

struct Ray {
  Vec3 origin = Vec3::Zero();  // camera center, world frame
  Vec3 dir = Vec3::Zero();     // unit direction, world frame
  double u = 0, v = 0;         // pixel coords
  double depth = 0;            // observed z-depth, 0 = invalid
  Vec3 color = Vec3::Zero();   // observed color

  // |dir_cam| for converting z-depth to distance along the unit ray
  double ray_scale = 1.0;
};

Ray cast_ray(const Intrinsics& intr, const CameraPose& pose, double u,
             double v);

// Slab test; returns false when the ray misses. t0/t1 are entry/exit
// distances along the unit direction (t0 clamped to 0 for inside origins).
bool intersect_aabb(const Vec3& origin, const Vec3& dir, const Aabb& box,
                    double& t0, double& t1);

}  // namespace gridslam::render
