#include "gridslam/data_io/mesh.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gridslam::data_io {

Aabb TriangleMesh::bbox() const {
  Aabb b;
  if (vertices.empty()) return b;
  b.min = b.max = vertices[0];
  for (const auto& v : vertices) {
    b.min = b.min.cwiseMin(v);
    b.max = b.max.cwiseMax(v);
  }
  return b;
}

double TriangleMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
  const Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * e1.cross(e2).norm();
}

double TriangleMesh::area() const {
  double a = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t)
    a += triangle_area(t);
  return a;
}

void TriangleMesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto& v : vertices)
    if (!v.allFinite()) throw DataError("mesh has a non-finite vertex");
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= n)
        throw DataError("mesh triangle index out of range");
  if (!colors.empty() && colors.size() != vertices.size())
    throw DataError("mesh color count mismatch");
  if (!forecast.empty() && forecast.size() != vertices.size())
    throw DataError("mesh forecast flag count mismatch");
}

void save_ply(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  const bool with_color = !mesh.colors.empty();
  const bool with_flag = !mesh.forecast.empty();
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  if (with_color)
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (with_flag) out << "property uchar forecast\n";
  out << "element face " << mesh.triangles.size() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  char line[256];
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    int n = snprintf(line, sizeof(line), "%.6f %.6f %.6f", v.x(), v.y(), v.z());
    if (with_color) {
      const Vec3& c = mesh.colors[i];
      n += snprintf(line + n, sizeof(line) - n, " %d %d %d",
                    int(std::lround(std::clamp(c.x(), 0.0, 1.0) * 255)),
                    int(std::lround(std::clamp(c.y(), 0.0, 1.0) * 255)),
                    int(std::lround(std::clamp(c.z(), 0.0, 1.0) * 255)));
    }
    if (with_flag)
      n += snprintf(line + n, sizeof(line) - n, " %d", int(mesh.forecast[i]));
    out << line << "\n";
  }
  for (const auto& t : mesh.triangles)
    out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

TriangleMesh load_ply(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open mesh '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line != "ply") throw DataError("'" + path + "' is not a PLY file");
  int n_vertex = 0, n_face = 0;
  bool with_color = false, with_flag = false;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "element") {
      std::string what;
      int count;
      ss >> what >> count;
      if (what == "vertex") n_vertex = count;
      if (what == "face") n_face = count;
    } else if (tok == "property") {
      if (line.find("red") != std::string::npos) with_color = true;
      if (line.find("forecast") != std::string::npos) with_flag = true;
    } else if (tok == "end_header") {
      break;
    }
  }
  TriangleMesh mesh;
  mesh.vertices.resize(n_vertex);
  if (with_color) mesh.colors.resize(n_vertex);
  if (with_flag) mesh.forecast.resize(n_vertex);
  for (int i = 0; i < n_vertex; ++i) {
    std::getline(in, line);
    std::istringstream ss(line);
    ss >> mesh.vertices[i].x() >> mesh.vertices[i].y() >> mesh.vertices[i].z();
    if (with_color) {
      int r, g, b;
      ss >> r >> g >> b;
      mesh.colors[i] = Vec3(r / 255.0, g / 255.0, b / 255.0);
    }
    if (with_flag) {
      int f;
      ss >> f;
      mesh.forecast[i] = static_cast<std::uint8_t>(f);
    }
  }
  mesh.triangles.resize(n_face);
  for (int i = 0; i < n_face; ++i) {
    std::getline(in, line);
    std::istringstream ss(line);
    int cnt;
    ss >> cnt >> mesh.triangles[i][0] >> mesh.triangles[i][1] >>
        mesh.triangles[i][2];
    if (cnt != 3) throw DataError("non-triangle face in '" + path + "'");
  }
  if (!in) throw DataError("truncated PLY '" + path + "'");
  mesh.validate();
  return mesh;
}

}  // namespace gridslam::data_io
