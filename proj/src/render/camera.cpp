#include "gridslam/render/camera.hpp"

namespace gridslam::render {

Ray cast_ray(const Intrinsics& intr, const CameraPose& pose, double u,
             double v) {
  Ray r;
  r.u = u;
  r.v = v;
  const Vec3 dir_cam = intr.backproject(u, v);
  r.ray_scale = dir_cam.norm();
  r.origin = pose.t;
  r.dir = pose.R * (dir_cam / r.ray_scale);
  return r;
}

bool intersect_aabb(const Vec3& origin, const Vec3& dir, const Aabb& box,
                    double& t0, double& t1) {
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir[a]) < 1e-15) {
      if (origin[a] < box.min[a] || origin[a] > box.max[a]) return false;
      continue;
    }
    double ta = (box.min[a] - origin[a]) / dir[a];
    double tb = (box.max[a] - origin[a]) / dir[a];
    if (ta > tb) std::swap(ta, tb);
    lo = std::max(lo, ta);
    hi = std::min(hi, tb);
  }
  if (hi <= lo) return false;
  t0 = lo;
  t1 = hi;
  return true;
}

}  // namespace gridslam::render
