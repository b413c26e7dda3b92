#include "gridslam/data_io/metrics.hpp"

#include <map>

namespace gridslam::data_io {

double ate_rmse(const Trajectory& estimated, const Trajectory& reference,
                double max_dt) {
  std::vector<std::pair<Vec3, Vec3>> matches;  // (est, ref)
  for (const auto& e : estimated) {
    double best_dt = max_dt;
    const TimedPose* hit = nullptr;
    for (const auto& r : reference) {
      const double dt = std::abs(r.timestamp - e.timestamp);
      if (dt <= best_dt) {
        best_dt = dt;
        hit = &r;
      }
    }
    if (hit) matches.emplace_back(e.pose.t, hit->pose.t);
  }
  if (matches.size() < 2)
    throw MetricError("ate_rmse needs at least 2 matched timestamps");

  Eigen::Matrix3Xd src(3, matches.size()), dst(3, matches.size());
  for (std::size_t i = 0; i < matches.size(); ++i) {
    src.col(i) = matches[i].first;
    dst.col(i) = matches[i].second;
  }
  const Eigen::Matrix4d T = Eigen::umeyama(src, dst, /*with_scaling=*/false);
  const Eigen::Matrix3d R = T.block<3, 3>(0, 0);
  const Vec3 t = T.block<3, 1>(0, 3);
  double sq = 0.0;
  for (std::size_t i = 0; i < matches.size(); ++i)
    sq += (R * matches[i].first + t - matches[i].second).squaredNorm();
  return std::sqrt(sq / matches.size()) * 100.0;
}

TriangleMesh cull_mesh(const TriangleMesh& reference,
                       const std::vector<scene::Frustum>& frusta) {
  if (frusta.empty()) return reference;
  std::vector<char> keep_vertex(reference.vertices.size(), 0);
  for (std::size_t i = 0; i < reference.vertices.size(); ++i)
    for (const auto& fr : frusta)
      if (fr.contains(reference.vertices[i])) {
        keep_vertex[i] = 1;
        break;
      }
  TriangleMesh out;
  std::vector<int> remap(reference.vertices.size(), -1);
  for (const auto& tri : reference.triangles) {
    if (!keep_vertex[tri[0]] && !keep_vertex[tri[1]] && !keep_vertex[tri[2]])
      continue;
    std::array<int, 3> t2;
    for (int k = 0; k < 3; ++k) {
      if (remap[tri[k]] < 0) {
        remap[tri[k]] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(reference.vertices[tri[k]]);
        if (!reference.colors.empty())
          out.colors.push_back(reference.colors[tri[k]]);
        if (!reference.forecast.empty())
          out.forecast.push_back(reference.forecast[tri[k]]);
      }
      t2[k] = remap[tri[k]];
    }
    out.triangles.push_back(t2);
  }
  return out;
}

DepthImage render_mesh_depth(const MeshAccel& accel, const Intrinsics& intr,
                             const diffmath::CameraPose& pose, double t_max) {
  DepthImage d = DepthImage::create(intr.width, intr.height);
  for (int v = 0; v < intr.height; ++v)
    for (int u = 0; u < intr.width; ++u) {
      const Vec3 dir_cam = intr.backproject(u + 0.5, v + 0.5);
      const double scale = dir_cam.norm();
      const Vec3 dir = pose.R * (dir_cam / scale);
      if (auto t = accel.raycast(pose.t, dir, t_max))
        d.at(u, v) = *t / scale;
    }
  return d;
}

EvalReport reconstruction_metrics(const TriangleMesh& reconstruction,
                                  const TriangleMesh& reference,
                                  const std::vector<scene::Frustum>& frusta,
                                  const Intrinsics& intr,
                                  const Trajectory& view_poses,
                                  const MetricConfig& cfg) {
  if (reconstruction.empty() || reference.empty())
    throw MetricError("reconstruction_metrics needs non-empty meshes");
  const TriangleMesh culled = cull_mesh(reference, frusta);
  if (culled.empty())
    throw MetricError("reference mesh is empty after frustum culling");

  diffmath::Rng rng(cfg.seed);
  MeshAccel rec_accel(reconstruction);
  MeshAccel ref_accel(culled);

  EvalReport rep;
  {
    auto pts = sample_surface(reconstruction, cfg.surface_samples, rng);
    double acc = 0.0;
    for (const auto& p : pts) acc += ref_accel.distance(p);
    rep.accuracy_cm = acc / pts.size() * 100.0;
  }
  {
    auto pts = sample_surface(culled, cfg.surface_samples, rng);
    double comp = 0.0;
    int under = 0;
    for (const auto& p : pts) {
      const double d = rec_accel.distance(p);
      comp += d;
      if (d < cfg.ratio_threshold) ++under;
    }
    rep.completion_cm = comp / pts.size() * 100.0;
    rep.completion_ratio_pct = 100.0 * under / pts.size();
  }

  if (!view_poses.empty() && cfg.depth_views > 0) {
    std::normal_distribution<double> jitter(0.0, cfg.view_jitter);
    std::uniform_int_distribution<int> pick(0, int(view_poses.size()) - 1);
    double l1 = 0.0;
    std::int64_t n_px = 0;
    int views = 0, attempts = 0;
    while (views < cfg.depth_views && attempts < cfg.depth_views * 20) {
      ++attempts;
      diffmath::CameraPose pose = view_poses[pick(rng)].pose;
      diffmath::Vec6 d;
      for (int i = 0; i < 6; ++i) d[i] = jitter(rng);
      pose = diffmath::se3_retract(pose, d);
      if (ref_accel.distance(pose.t) < cfg.free_space_clearance) continue;
      DepthImage a = render_mesh_depth(rec_accel, intr, pose);
      DepthImage b = render_mesh_depth(ref_accel, intr, pose);
      for (std::size_t i = 0; i < a.depth.size(); ++i)
        if (a.depth[i] > 0.0 && b.depth[i] > 0.0) {
          l1 += std::abs(a.depth[i] - b.depth[i]);
          ++n_px;
        }
      ++views;
    }
    if (n_px > 0) rep.depth_l1_cm = l1 / n_px * 100.0;
  }
  return rep;
}

}  // namespace gridslam::data_io
