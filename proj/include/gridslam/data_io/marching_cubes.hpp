#pragma once

#include <functional>

#include "gridslam/data_io/mesh.hpp"

namespace gridslam::data_io {

extern const int kMcEdgeTable[256];
extern const int kMcTriTable[256][16];

// Batched scalar field: fills values (one per point).
using FieldFn =
    std::function<void(const std::vector<Vec3>&, std::vector<double>&)>;

// Iso-surface of the field over a lattice with the given spacing. The lattice
// is kept inside the bounds (floor(extent/res)+1 nodes per axis), so field
// evaluations never leave them. Shared vertices are welded along cell edges.
TriangleMesh marching_cubes(const FieldFn& field, const Aabb& bounds,
                            double resolution, double iso = 0.5);

}  // namespace gridslam::data_io
