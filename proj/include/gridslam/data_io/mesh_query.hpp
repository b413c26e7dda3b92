#pragma once

#include <optional>

#include "gridslam/data_io/mesh.hpp"
#include "gridslam/diffmath/tensor.hpp"

namespace gridslam::data_io {

// Uniform-grid acceleration structure over mesh triangles for closest-point
// and first-hit queries.
class MeshAccel {
 public:
  explicit MeshAccel(const TriangleMesh& mesh, int target_cells = 64);

  double distance(const Vec3& p) const;  // point to nearest surface point
  std::optional<double> raycast(const Vec3& origin, const Vec3& dir,
                                double t_max) const;

 private:
  const TriangleMesh& mesh_;
  Aabb box_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1, nz_ = 1;
  std::vector<std::vector<int>> cells_;

  int cell_index(int i, int j, int k) const {
    return (k * ny_ + j) * nx_ + i;
  }
  void cell_of(const Vec3& p, int c[3]) const;
  double tri_distance_sq(int t, const Vec3& p) const;
};

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c);

bool ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                  const Vec3& c, double& t);

// Area-weighted uniform surface samples.
std::vector<Vec3> sample_surface(const TriangleMesh& mesh, int n,
                                 diffmath::Rng& rng);

}  // namespace gridslam::data_io
