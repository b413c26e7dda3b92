#pragma once

#include "gridslam/data_io/marching_cubes.hpp"
#include "gridslam/scene/frustum.hpp"
#include "gridslam/scene/scene.hpp"

namespace gridslam::data_io {

enum class MeshMode { observed_only, with_forecast };

// Marching cubes at iso 0.5 over the scene occupancy. Points inside any
// keyframe frustum use the fine-level occupancy; outside points falling in
// partially observed coarse voxels use the coarse level (forecast) when
// enabled; everything else counts as free space. Observed vertices take their
// color from the color decoder, forecast vertices are cyan and flagged.
TriangleMesh extract_mesh(const scene::HierarchicalScene& s,
                          const std::vector<scene::Frustum>& keyframe_frusta,
                          double resolution, MeshMode mode);

}  // namespace gridslam::data_io
