#include "gridslam/data_io/extract.hpp"

namespace gridslam::data_io {

using diffmath::Tensor;

namespace {

bool in_any_frustum(const std::vector<scene::Frustum>& frusta, const Vec3& p) {
  for (const auto& fr : frusta)
    if (fr.contains(p)) return true;
  return false;
}

}  // namespace

TriangleMesh extract_mesh(const scene::HierarchicalScene& s,
                          const std::vector<scene::Frustum>& keyframe_frusta,
                          double resolution, MeshMode mode) {
  const bool forecast_on = mode == MeshMode::with_forecast;

  auto field = [&](const std::vector<Vec3>& pts, std::vector<double>& out) {
    out.assign(pts.size(), 0.0);
    std::vector<std::int64_t> observed, forecast;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (in_any_frustum(keyframe_frusta, pts[i]))
        observed.push_back(i);
      else if (forecast_on) {
        const std::int64_t voxel = s.coarse_voxel_of(pts[i]);
        if (voxel >= 0 && s.coarse_obs[voxel] > 0) forecast.push_back(i);
      }
    }
    auto run = [&](const std::vector<std::int64_t>& idx, bool fine_level) {
      if (idx.empty()) return;
      Tensor p = Tensor::zeros({static_cast<int>(idx.size()), 3});
      for (std::size_t k = 0; k < idx.size(); ++k)
        for (int a = 0; a < 3; ++a) p.data()[k * 3 + a] = pts[idx[k]][a];
      Tensor occ = fine_level ? scene::occupancy_fine(nullptr, s, p).occ
                              : scene::occupancy_coarse(nullptr, s, p);
      for (std::size_t k = 0; k < idx.size(); ++k)
        out[idx[k]] = occ.data()[k];
    };
    run(observed, true);
    run(forecast, false);
  };

  TriangleMesh mesh =
      marching_cubes(field, s.bounds, resolution, /*iso=*/0.5);
  if (mesh.vertices.empty()) return mesh;

  mesh.colors.resize(mesh.vertices.size(), Vec3(0, 1, 1));
  mesh.forecast.assign(mesh.vertices.size(), 1);
  std::vector<std::int64_t> observed;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    if (in_any_frustum(keyframe_frusta, mesh.vertices[i])) {
      observed.push_back(i);
      mesh.forecast[i] = 0;
    }
  if (!observed.empty()) {
    Tensor p = Tensor::zeros({static_cast<int>(observed.size()), 3});
    for (std::size_t k = 0; k < observed.size(); ++k)
      for (int a = 0; a < 3; ++a)
        p.data()[k * 3 + a] = mesh.vertices[observed[k]][a];
    Tensor c = scene::color_query(nullptr, s, p);
    for (std::size_t k = 0; k < observed.size(); ++k)
      mesh.colors[observed[k]] =
          Vec3(c.data()[k * 3], c.data()[k * 3 + 1], c.data()[k * 3 + 2]);
  }
  mesh.validate();
  return mesh;
}

}  // namespace gridslam::data_io
