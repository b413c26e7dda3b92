#include "gridslam/synthworld/world.hpp"

#include <cmath>

namespace gridslam::synthworld {

double Primitive::sdf(const Vec3& p) const {
  switch (kind) {
    case Kind::box: {
      const Vec3 q = (p - center).cwiseAbs() - half;
      const Vec3 qc = q.cwiseMax(0.0);
      const double outside = qc.norm();
      const double inside = std::min(q.maxCoeff(), 0.0);
      return outside + inside;
    }
    case Kind::sphere:
      return (p - center).norm() - radius;
    case Kind::plane:
      return (p - center).dot(normal);
  }
  return 0.0;
}

double AnalyticScene::sdf(const Vec3& p, const Vec3& dynamic_offset,
                          int* hit_prim) const {
  double best = std::numeric_limits<double>::infinity();
  int which = -1;
  for (std::size_t i = 0; i < prims.size(); ++i) {
    const Vec3 q = prims[i].dynamic ? Vec3(p - dynamic_offset) : p;
    const double d = prims[i].sdf(q);
    if (d < best) {
      best = d;
      which = static_cast<int>(i);
    }
  }
  if (hit_prim) *hit_prim = which;
  return best;
}

Vec3 AnalyticScene::normal_at(const Vec3& p, const Vec3& dyn) const {
  const double e = 1e-5;
  Vec3 n;
  for (int a = 0; a < 3; ++a) {
    Vec3 hi = p, lo = p;
    hi[a] += e;
    lo[a] -= e;
    n[a] = sdf(hi, dyn) - sdf(lo, dyn);
  }
  const double len = n.norm();
  return len > 0 ? Vec3(n / len) : Vec3(0, 0, 1);
}

double scene_sdf(const AnalyticScene& s, const Vec3& p) { return s.sdf(p); }
bool scene_occupancy(const AnalyticScene& s, const Vec3& p) {
  return s.occupancy(p);
}

AnalyticScene make_room(const Aabb& interior, double t, Rng* rng) {
  AnalyticScene s;
  s.bounds = interior;
  const Vec3 c = interior.center();
  const Vec3 h = 0.5 * interior.extent();
  auto wall = [&](const Vec3& center, const Vec3& half, const Vec3& albedo) {
    Primitive p;
    p.kind = Primitive::Kind::box;
    p.center = center;
    p.half = half;
    p.albedo = albedo;
    s.prims.push_back(p);
  };
  std::uniform_real_distribution<double> tint(0.25, 0.9);
  auto color = [&](double r, double g, double b) {
    if (!rng) return Vec3(r, g, b);
    return Vec3(tint(*rng), tint(*rng), tint(*rng));
  };
  // floor, ceiling, then -x +x -y +y walls; slight overlap at the edges
  wall(Vec3(c.x(), c.y(), interior.min.z() - t / 2),
       Vec3(h.x() + t, h.y() + t, t / 2), color(0.55, 0.45, 0.35));
  wall(Vec3(c.x(), c.y(), interior.max.z() + t / 2),
       Vec3(h.x() + t, h.y() + t, t / 2), color(0.85, 0.85, 0.8));
  wall(Vec3(interior.min.x() - t / 2, c.y(), c.z()),
       Vec3(t / 2, h.y() + t, h.z() + t), color(0.75, 0.3, 0.3));
  wall(Vec3(interior.max.x() + t / 2, c.y(), c.z()),
       Vec3(t / 2, h.y() + t, h.z() + t), color(0.3, 0.65, 0.35));
  wall(Vec3(c.x(), interior.min.y() - t / 2, c.z()),
       Vec3(h.x() + t, t / 2, h.z() + t), color(0.35, 0.4, 0.75));
  wall(Vec3(c.x(), interior.max.y() + t / 2, c.z()),
       Vec3(h.x() + t, t / 2, h.z() + t), color(0.8, 0.75, 0.3));
  return s;
}

AnalyticScene random_room(Rng& rng, const Aabb& interior) {
  AnalyticScene s = make_room(interior, 0.2, &rng);
  std::uniform_int_distribution<int> count(3, 6);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Vec3 ext = interior.extent();
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    Primitive p;
    const bool is_box = u01(rng) < 0.6;
    const double margin = 0.4;
    Vec3 pos;
    for (int a = 0; a < 3; ++a)
      pos[a] = interior.min[a] + margin +
               u01(rng) * std::max(ext[a] - 2 * margin, 0.1);
    p.albedo = Vec3(0.15 + 0.8 * u01(rng), 0.15 + 0.8 * u01(rng),
                    0.15 + 0.8 * u01(rng));
    if (is_box) {
      p.kind = Primitive::Kind::box;
      p.center = pos;
      p.half = Vec3(0.15 + 0.35 * u01(rng), 0.15 + 0.35 * u01(rng),
                    0.15 + 0.35 * u01(rng));
      // rest furniture on the floor
      p.center.z() = interior.min.z() + p.half.z();
    } else {
      p.kind = Primitive::Kind::sphere;
      p.radius = 0.15 + 0.3 * u01(rng);
      p.center = pos;
      p.center.z() = interior.min.z() + p.radius;
    }
    s.prims.push_back(p);
  }
  return s;
}

CameraPose look_at(const Vec3& eye, const Vec3& target) {
  CameraPose pose;
  const Vec3 z = (target - eye).normalized();
  Vec3 x = z.cross(Vec3(0, 0, 1));
  if (x.norm() < 1e-9) x = Vec3(1, 0, 0);
  x.normalize();
  const Vec3 y = z.cross(x);
  pose.R.col(0) = x;
  pose.R.col(1) = y;
  pose.R.col(2) = z;
  pose.t = eye;
  return pose;
}

std::vector<CameraPose> scripted_trajectory(const AnalyticScene& scene,
                                            const TrajectorySpec& spec) {
  std::vector<CameraPose> poses;
  for (int f = 0; f < spec.frames; ++f) {
    const double a = spec.frames > 1 ? double(f) / (spec.frames - 1) : 0.0;
    CameraPose pose;
    switch (spec.kind) {
      case TrajectorySpec::Kind::orbit: {
        const double ang = spec.arc_start + a * (spec.arc_end - spec.arc_start);
        const Vec3 eye(spec.target.x() + spec.radius * std::cos(ang),
                       spec.target.y() + spec.radius * std::sin(ang),
                       spec.height);
        pose = look_at(eye, spec.target);
        break;
      }
      case TrajectorySpec::Kind::pan: {
        const double yaw = a * spec.pan_angle;
        const Vec3 fwd0 = (spec.target - spec.start_eye).normalized();
        const Vec3 fwd = diffmath::so3_exp(Vec3(0, 0, yaw)) * fwd0;
        pose = look_at(spec.start_eye, spec.start_eye + fwd);
        break;
      }
      case TrajectorySpec::Kind::dolly: {
        const Vec3 eye = spec.start_eye + a * spec.dolly_delta;
        pose = look_at(eye, spec.target);
        break;
      }
    }
    if (scene.sdf(pose.t) <= 0.1)
      throw std::runtime_error(
          "scripted_trajectory: camera position is not in free space");
    poses.push_back(pose);
  }
  return poses;
}

void render_gt_frame(const AnalyticScene& scene, const CameraPose& pose,
                     const Intrinsics& intr, const RenderNoise& noise,
                     Rng& rng, data_io::Image& color,
                     data_io::DepthImage& depth,
                     std::vector<std::uint8_t>* dynamic_mask,
                     const Vec3& dyn) {
  color = data_io::Image::create(intr.width, intr.height);
  depth = data_io::DepthImage::create(intr.width, intr.height);
  if (dynamic_mask)
    dynamic_mask->assign(std::size_t(intr.width) * intr.height, 0);
  std::normal_distribution<double> dnoise(0.0, noise.depth_sigma);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const double tmax = 3.0 * scene.bounds.extent().norm();
  for (int v = 0; v < intr.height; ++v)
    for (int u = 0; u < intr.width; ++u) {
      const Vec3 dir_cam = intr.backproject(u + 0.5, v + 0.5);
      const double scale = dir_cam.norm();
      const Vec3 dir = pose.R * (dir_cam / scale);

      double t = 0.0;
      int hit = -1;
      bool found = false;
      for (int step = 0; step < 128; ++step) {
        const Vec3 p = pose.t + t * dir;
        const double d = scene.sdf(p, dyn, &hit);
        if (d < 1e-6) {
          found = true;
          break;
        }
        t += d;
        if (t > tmax) break;
      }
      if (!found) continue;

      const Vec3 p = pose.t + t * dir;
      const Primitive& prim = scene.prims[hit];
      const Vec3 n = scene.normal_at(p, dyn);
      const double lambert =
          0.35 + 0.65 * std::max(0.0, n.dot(-scene.light_dir));
      double* rgb = color.at(u, v);
      for (int ch = 0; ch < 3; ++ch)
        rgb[ch] = std::clamp(prim.albedo[ch] * lambert, 0.0, 1.0);

      double z = t / scale;  // z-depth
      if (noise.depth_sigma > 0.0) z += dnoise(rng);
      if (noise.dropout > 0.0 && u01(rng) < noise.dropout) z = 0.0;
      depth.at(u, v) = std::max(z, 0.0);
      if (dynamic_mask && prim.dynamic)
        (*dynamic_mask)[std::size_t(v) * intr.width + u] = 1;
    }
}

Sequence make_sequence(const AnalyticScene& scene,
                       const std::vector<CameraPose>& poses,
                       const Intrinsics& intr, const RenderNoise& noise,
                       Rng& rng, const std::optional<DynamicTrack>& dynamics,
                       double fps) {
  Sequence seq;
  seq.stream.intrinsics = intr;
  for (std::size_t f = 0; f < poses.size(); ++f) {
    data_io::Frame frame;
    frame.timestamp = double(f) / fps;
    const Vec3 dyn = dynamics ? dynamics->offset(static_cast<int>(f))
                              : Vec3::Zero();
    std::vector<std::uint8_t> mask;
    render_gt_frame(scene, poses[f], intr, noise, rng, frame.color,
                    frame.depth, dynamics ? &mask : nullptr, dyn);
    if (dynamics) seq.dynamic_masks.push_back(std::move(mask));
    seq.stream.frames.push_back(std::move(frame));
    seq.gt.push_back({double(f) / fps, poses[f]});
  }
  return seq;
}

}  // namespace gridslam::synthworld
