#pragma once

#include <cstdint>
#include <vector>

#include "gridslam/diffmath/pose.hpp"
#include "gridslam/geometry.hpp"
#include "gridslam/scene/feature_grid.hpp"

namespace gridslam::scene {

using diffmath::CameraPose;

// Viewing frustum of one frame: camera-frame depth in [near, far] and pixel
// inside the (optionally dilated) image rectangle.
struct Frustum {
  Intrinsics intr;
  CameraPose pose;  // camera-to-world
  double near = 0.0;
  double far = 0.0;
  double dilate_px = 0.0;

  bool contains(const Vec3& world_point) const;
};

// Lattice nodes whose positions are inside the frustum. A voxel lies fully
// inside the (convex) frustum exactly when its 8 corner nodes are marked, so
// the node mask doubles as the voxel-containment test used to keep mapping
// samples away from unmasked nodes.
struct FrustumMask {
  std::vector<std::uint8_t> node_inside;  // per lattice node
  std::int64_t count = 0;

  bool voxel_fully_inside(const FeatureGrid& grid, int ix, int iy,
                          int iz) const;
};

FrustumMask build_frustum_mask(const FeatureGrid& grid, const Frustum& fr);

// Union over frames; all masks must be over the same grid.
FrustumMask union_masks(const std::vector<FrustumMask>& masks);

// Flat indices into the feature tensor covered by masked nodes.
std::vector<std::int64_t> mask_feature_indices(const FrustumMask& mask,
                                               int feature_dim);

}  // namespace gridslam::scene
