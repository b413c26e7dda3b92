#include "gridslam/data_io/mesh_query.hpp"

#include <cmath>

namespace gridslam::data_io {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

bool ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                  const Vec3& c, double& t) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pv = d.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < 1e-14) return false;
  const double inv = 1.0 / det;
  const Vec3 tv = o - a;
  const double u = tv.dot(pv) * inv;
  if (u < -1e-12 || u > 1.0 + 1e-12) return false;
  const Vec3 qv = tv.cross(e1);
  const double v = d.dot(qv) * inv;
  if (v < -1e-12 || u + v > 1.0 + 1e-12) return false;
  const double tt = e2.dot(qv) * inv;
  if (tt <= 1e-12) return false;
  t = tt;
  return true;
}

MeshAccel::MeshAccel(const TriangleMesh& mesh, int target_cells)
    : mesh_(mesh) {
  box_ = mesh.bbox();
  box_ = box_.padded(1e-6);
  const Vec3 ext = box_.extent();
  const double longest = std::max({ext.x(), ext.y(), ext.z(), 1e-6});
  cell_ = longest / target_cells;
  nx_ = std::max(1, int(std::ceil(ext.x() / cell_)));
  ny_ = std::max(1, int(std::ceil(ext.y() / cell_)));
  nz_ = std::max(1, int(std::ceil(ext.z() / cell_)));
  cells_.assign(std::size_t(nx_) * ny_ * nz_, {});
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    Aabb tb;
    tb.min = tb.max = mesh.vertices[mesh.triangles[t][0]];
    for (int k = 1; k < 3; ++k) {
      tb.min = tb.min.cwiseMin(mesh.vertices[mesh.triangles[t][k]]);
      tb.max = tb.max.cwiseMax(mesh.vertices[mesh.triangles[t][k]]);
    }
    int lo[3], hi[3];
    cell_of(tb.min, lo);
    cell_of(tb.max, hi);
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i)
          cells_[cell_index(i, j, k)].push_back(t);
  }
}

void MeshAccel::cell_of(const Vec3& p, int c[3]) const {
  const Vec3 rel = (p - box_.min) / cell_;
  const int n[3] = {nx_, ny_, nz_};
  for (int a = 0; a < 3; ++a)
    c[a] = std::min(std::max(int(std::floor(rel[a])), 0), n[a] - 1);
}

double MeshAccel::tri_distance_sq(int t, const Vec3& p) const {
  const auto& tri = mesh_.triangles[t];
  const Vec3 q = closest_point_on_triangle(
      p, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]], mesh_.vertices[tri[2]]);
  return (p - q).squaredNorm();
}

double MeshAccel::distance(const Vec3& p) const {
  int c[3];
  cell_of(p, c);
  double best = std::numeric_limits<double>::infinity();
  const int max_ring = std::max({nx_, ny_, nz_});
  for (int ring = 0; ring <= max_ring; ++ring) {
    // once a hit exists, expand one extra ring to guarantee correctness
    if (best < std::numeric_limits<double>::infinity()) {
      const double safe = (ring - 1) * cell_;
      if (safe > 0 && best <= safe * safe) break;
    }
    bool any_cell = false;
    for (int k = c[2] - ring; k <= c[2] + ring; ++k)
      for (int j = c[1] - ring; j <= c[1] + ring; ++j)
        for (int i = c[0] - ring; i <= c[0] + ring; ++i) {
          if (i < 0 || j < 0 || k < 0 || i >= nx_ || j >= ny_ || k >= nz_)
            continue;
          const bool shell = std::max({std::abs(i - c[0]), std::abs(j - c[1]),
                                       std::abs(k - c[2])}) == ring;
          if (!shell) continue;
          any_cell = true;
          for (int t : cells_[cell_index(i, j, k)])
            best = std::min(best, tri_distance_sq(t, p));
        }
    if (!any_cell && ring > 0 &&
        best < std::numeric_limits<double>::infinity())
      break;
  }
  return std::sqrt(best);
}

std::optional<double> MeshAccel::raycast(const Vec3& origin, const Vec3& dir,
                                         double t_max) const {
  // clip to the accel box
  double t0 = 0.0, t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir[a]) < 1e-15) {
      if (origin[a] < box_.min[a] || origin[a] > box_.max[a])
        return std::nullopt;
      continue;
    }
    double ta = (box_.min[a] - origin[a]) / dir[a];
    double tb = (box_.max[a] - origin[a]) / dir[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t1 <= t0) return std::nullopt;

  // DDA through the grid
  Vec3 p = origin + (t0 + 1e-9) * dir;
  int c[3];
  cell_of(p, c);
  const int step[3] = {dir.x() > 0 ? 1 : -1, dir.y() > 0 ? 1 : -1,
                       dir.z() > 0 ? 1 : -1};
  double t_next[3], t_delta[3];
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir[a]) < 1e-15) {
      t_next[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
      continue;
    }
    const double edge =
        box_.min[a] + (c[a] + (step[a] > 0 ? 1 : 0)) * cell_;
    t_next[a] = (edge - origin[a]) / dir[a];
    t_delta[a] = cell_ / std::abs(dir[a]);
  }

  double t_cell = t0;
  while (t_cell <= t1) {
    const double t_exit = std::min({t_next[0], t_next[1], t_next[2]});
    double best = std::numeric_limits<double>::infinity();
    for (int t : cells_[cell_index(c[0], c[1], c[2])]) {
      const auto& tri = mesh_.triangles[t];
      double th;
      if (ray_triangle(origin, dir, mesh_.vertices[tri[0]],
                       mesh_.vertices[tri[1]], mesh_.vertices[tri[2]], th) &&
          th <= t_exit + 1e-9 && th <= t_max)
        best = std::min(best, th);
    }
    if (best < std::numeric_limits<double>::infinity()) return best;

    int axis = 0;
    if (t_next[1] < t_next[0]) axis = 1;
    if (t_next[2] < t_next[axis]) axis = 2;
    c[axis] += step[axis];
    if (c[axis] < 0 || c[axis] >= (axis == 0 ? nx_ : axis == 1 ? ny_ : nz_))
      return std::nullopt;
    t_cell = t_next[axis];
    t_next[axis] += t_delta[axis];
  }
  return std::nullopt;
}

std::vector<Vec3> sample_surface(const TriangleMesh& mesh, int n,
                                 diffmath::Rng& rng) {
  std::vector<Vec3> out;
  if (mesh.triangles.empty() || n <= 0) return out;
  std::vector<double> cum(mesh.triangles.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    acc += mesh.triangle_area(static_cast<int>(t));
    cum[t] = acc;
  }
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double r = u01(rng) * acc;
    const std::size_t t =
        std::lower_bound(cum.begin(), cum.end(), r) - cum.begin();
    const auto& tri = mesh.triangles[std::min(t, mesh.triangles.size() - 1)];
    double su = std::sqrt(u01(rng));
    double sv = u01(rng);
    const double b0 = 1.0 - su, b1 = su * (1.0 - sv), b2 = su * sv;
    out.push_back(b0 * mesh.vertices[tri[0]] + b1 * mesh.vertices[tri[1]] +
                  b2 * mesh.vertices[tri[2]]);
  }
  return out;
}

}  // namespace gridslam::data_io
