#pragma once

#include <array>
#include <string>
#include <vector>

#include "gridslam/geometry.hpp"

namespace gridslam::data_io {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> colors;             // per-vertex RGB in [0,1]; may be empty
  std::vector<std::uint8_t> forecast;   // provenance: 1 = forecast geometry

  bool empty() const { return triangles.empty(); }
  Aabb bbox() const;
  double area() const;
  double triangle_area(int t) const;
  void validate() const;  // indices in range, no NaN vertices
};

// ASCII PLY with per-vertex uchar RGB and a uchar forecast property.
void save_ply(const TriangleMesh& mesh, const std::string& path);
TriangleMesh load_ply(const std::string& path);

}  // namespace gridslam::data_io
