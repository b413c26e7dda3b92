#include "gridslam/data_io/marching_cubes.hpp"

#include <cmath>
#include <unordered_map>

namespace gridslam::data_io {

namespace {

// cube corners in the table convention: ring 0-1-2-3 at z, ring 4-5-6-7 at
// z+1; edge e connects kEdgeEnds[e]
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdgeEnds[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                  {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                  {0, 4}, {1, 5}, {2, 6}, {3, 7}};

}  // namespace

TriangleMesh marching_cubes(const FieldFn& field, const Aabb& bounds,
                            double resolution, double iso) {
  TriangleMesh mesh;
  const Vec3 ext = bounds.extent();
  const int nx = static_cast<int>(std::floor(ext.x() / resolution + 1e-12)) + 1;
  const int ny = static_cast<int>(std::floor(ext.y() / resolution + 1e-12)) + 1;
  const int nz = static_cast<int>(std::floor(ext.z() / resolution + 1e-12)) + 1;
  if (nx < 2 || ny < 2 || nz < 2) return mesh;

  auto node_pos = [&](int i, int j, int k) {
    return Vec3(bounds.min.x() + i * resolution,
                bounds.min.y() + j * resolution,
                bounds.min.z() + k * resolution);
  };
  auto node_id = [&](int i, int j, int k) {
    return (std::int64_t(k) * ny + j) * nx + i;
  };

  // two z-layers of field values at a time
  const std::int64_t layer_n = std::int64_t(nx) * ny;
  std::vector<double> layer0(layer_n), layer1(layer_n);
  std::vector<Vec3> pts(layer_n);
  auto eval_layer = [&](int k, std::vector<double>& out) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) pts[std::size_t(j) * nx + i] = node_pos(i, j, k);
    field(pts, out);
  };
  eval_layer(0, layer0);

  // welded vertices keyed by (lattice node, axis) of the edge
  std::unordered_map<std::int64_t, int> edge_vertex;
  auto vertex_on_edge = [&](int i0, int j0, int k0, int i1, int j1, int k1,
                            double f0, double f1) {
    int axis = (i1 != i0) ? 0 : (j1 != j0 ? 1 : 2);
    // key on the lower endpoint
    if (i1 < i0 || j1 < j0 || k1 < k0) {
      std::swap(i0, i1);
      std::swap(j0, j1);
      std::swap(k0, k1);
      std::swap(f0, f1);
    }
    const std::int64_t key = node_id(i0, j0, k0) * 3 + axis;
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    double t = 0.5;
    if (std::abs(f1 - f0) > 1e-12) t = (iso - f0) / (f1 - f0);
    t = std::clamp(t, 0.0, 1.0);
    const Vec3 p = node_pos(i0, j0, k0) +
                   t * (node_pos(i1, j1, k1) - node_pos(i0, j0, k0));
    const int idx = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(p);
    edge_vertex.emplace(key, idx);
    return idx;
  };

  for (int k = 0; k + 1 < nz; ++k) {
    eval_layer(k + 1, layer1);
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i) {
        double f[8];
        int ci[8], cj[8], ck[8];
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          ci[c] = i + kCorner[c][0];
          cj[c] = j + kCorner[c][1];
          ck[c] = k + kCorner[c][2];
          const std::vector<double>& layer =
              kCorner[c][2] == 0 ? layer0 : layer1;
          f[c] = layer[std::size_t(cj[c]) * nx + ci[c]];
          if (f[c] > iso) cube |= (1 << c);
        }
        if (kMcEdgeTable[cube] == 0) continue;
        int ev[12];
        for (int e = 0; e < 12; ++e)
          if (kMcEdgeTable[cube] & (1 << e)) {
            const int a = kEdgeEnds[e][0], b = kEdgeEnds[e][1];
            ev[e] = vertex_on_edge(ci[a], cj[a], ck[a], ci[b], cj[b], ck[b],
                                   f[a], f[b]);
          }
        for (int t = 0; kMcTriTable[cube][t] != -1; t += 3)
          mesh.triangles.push_back({ev[kMcTriTable[cube][t]],
                                    ev[kMcTriTable[cube][t + 1]],
                                    ev[kMcTriTable[cube][t + 2]]});
      }
    std::swap(layer0, layer1);
  }
  return mesh;
}

}  // namespace gridslam::data_io
