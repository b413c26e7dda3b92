#pragma once

#include <cstdint>

#include "gridslam/diffmath/ops.hpp"
#include "gridslam/geometry.hpp"

namespace gridslam::scene {

using diffmath::Rng;
using diffmath::Tape;
using diffmath::Tensor;

struct OutOfBoundsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GridLevel { coarse, mid, fine, color };

// Regular lattice of learnable feature vectors. Node (ix,iy,iz) sits at
// origin + (ix,iy,iz)*side; lattice dims are ceil(extent/side)+1 per axis, so
// the covered region is at least the requested bounds.
struct FeatureGrid {
  GridLevel level = GridLevel::mid;
  double side = 0.0;
  Vec3 origin = Vec3::Zero();
  int nx = 0, ny = 0, nz = 0;
  int feature_dim = 0;
  Tensor features;  // [nx*ny*nz, feature_dim]

  // sigma = 0 gives a zero-initialized grid (rng may be null then).
  static FeatureGrid create(GridLevel level, const Aabb& bounds, double side,
                            int feature_dim, double sigma, Rng* rng);

  std::int64_t node_count() const {
    return std::int64_t(nx) * ny * nz;
  }
  std::int64_t node_index(int ix, int iy, int iz) const {
    return (std::int64_t(ix) * ny + iy) * nz + iz;
  }
  Vec3 node_position(int ix, int iy, int iz) const {
    return origin + side * Vec3(ix, iy, iz);
  }
  std::int64_t voxel_count() const {
    return std::int64_t(nx - 1) * (ny - 1) * (nz - 1);
  }
  std::int64_t voxel_index(int ix, int iy, int iz) const {
    return (std::int64_t(ix) * (ny - 1) + iy) * (nz - 1) + iz;
  }
  // Voxel containing p, clamped to valid cells.
  void locate(const Vec3& p, int cell[3], double frac[3]) const;
  bool contains(const Vec3& p) const;

  FeatureGrid clone() const;
};

// Trilinear blend of the 8 surrounding node features for each point ([n,3] ->
// [n,feature_dim]); differentiable w.r.t. the grid features and the points.
// Points outside the covered region throw OutOfBoundsError.
Tensor trilinear_sample(Tape* tape, const FeatureGrid& grid,
                        const Tensor& points);

}  // namespace gridslam::scene
