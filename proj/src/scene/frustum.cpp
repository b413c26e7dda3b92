#include "gridslam/scene/frustum.hpp"

namespace gridslam::scene {

bool Frustum::contains(const Vec3& world_point) const {
  const Vec3 cam = pose.R.transpose() * (world_point - pose.t);
  if (cam.z() < near || cam.z() > far) return false;
  double u, v;
  if (!intr.project(cam, u, v)) return false;
  return intr.pixel_in_image(u, v, dilate_px);
}

FrustumMask build_frustum_mask(const FeatureGrid& grid, const Frustum& fr) {
  FrustumMask mask;
  mask.node_inside.assign(grid.node_count(), 0);
  for (int ix = 0; ix < grid.nx; ++ix)
    for (int iy = 0; iy < grid.ny; ++iy)
      for (int iz = 0; iz < grid.nz; ++iz)
        if (fr.contains(grid.node_position(ix, iy, iz))) {
          mask.node_inside[grid.node_index(ix, iy, iz)] = 1;
          ++mask.count;
        }
  return mask;
}

bool FrustumMask::voxel_fully_inside(const FeatureGrid& grid, int ix, int iy,
                                     int iz) const {
  for (int c = 0; c < 8; ++c) {
    const int bx = (c >> 2) & 1, by = (c >> 1) & 1, bz = c & 1;
    if (!node_inside[grid.node_index(ix + bx, iy + by, iz + bz)]) return false;
  }
  return true;
}

FrustumMask union_masks(const std::vector<FrustumMask>& masks) {
  FrustumMask out;
  if (masks.empty()) return out;
  out.node_inside.assign(masks.front().node_inside.size(), 0);
  for (const auto& m : masks)
    for (std::size_t i = 0; i < m.node_inside.size(); ++i)
      out.node_inside[i] |= m.node_inside[i];
  for (auto b : out.node_inside) out.count += b;
  return out;
}

std::vector<std::int64_t> mask_feature_indices(const FrustumMask& mask,
                                               int feature_dim) {
  std::vector<std::int64_t> idx;
  idx.reserve(mask.count * feature_dim);
  for (std::size_t node = 0; node < mask.node_inside.size(); ++node)
    if (mask.node_inside[node])
      for (int k = 0; k < feature_dim; ++k)
        idx.push_back(std::int64_t(node) * feature_dim + k);
  return idx;
}

}  // namespace gridslam::scene
