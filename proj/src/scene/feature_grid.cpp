#include "gridslam/scene/feature_grid.hpp"

#include <cmath>

namespace gridslam::scene {

FeatureGrid FeatureGrid::create(GridLevel level, const Aabb& bounds,
                                double side, int feature_dim, double sigma,
                                Rng* rng) {
  FeatureGrid g;
  g.level = level;
  g.side = side;
  g.origin = bounds.min;
  g.feature_dim = feature_dim;
  const Vec3 ext = bounds.extent();
  g.nx = static_cast<int>(std::ceil(ext.x() / side - 1e-12)) + 1;
  g.ny = static_cast<int>(std::ceil(ext.y() / side - 1e-12)) + 1;
  g.nz = static_cast<int>(std::ceil(ext.z() / side - 1e-12)) + 1;
  const diffmath::Shape shape{static_cast<int>(g.node_count()), feature_dim};
  if (sigma > 0.0 && rng != nullptr)
    g.features = Tensor::randn(shape, *rng, sigma);
  else
    g.features = Tensor::zeros(shape);
  return g;
}

bool FeatureGrid::contains(const Vec3& p) const {
  const Vec3 rel = p - origin;
  return rel.x() >= 0.0 && rel.y() >= 0.0 && rel.z() >= 0.0 &&
         rel.x() <= side * (nx - 1) && rel.y() <= side * (ny - 1) &&
         rel.z() <= side * (nz - 1);
}

void FeatureGrid::locate(const Vec3& p, int cell[3], double frac[3]) const {
  const Vec3 local = (p - origin) / side;
  const int n[3] = {nx, ny, nz};
  for (int a = 0; a < 3; ++a) {
    int c = static_cast<int>(std::floor(local[a]));
    if (c < 0) c = 0;
    if (c > n[a] - 2) c = n[a] - 2;
    cell[a] = c;
    frac[a] = local[a] - c;
  }
}

FeatureGrid FeatureGrid::clone() const {
  FeatureGrid g = *this;
  g.features = features.clone();
  return g;
}

Tensor trilinear_sample(Tape* tape, const FeatureGrid& grid,
                        const Tensor& points) {
  if (points.ndim() != 2 || points.dim(1) != 3)
    throw diffmath::ShapeError("trilinear_sample expects [n,3] points");
  const std::int64_t n = points.dim(0);
  const int fd = grid.feature_dim;

  std::vector<std::int64_t> corner(n * 8);
  std::vector<double> fr(n * 3);
  const double* pv = points.data();
  for (std::int64_t i = 0; i < n; ++i) {
    const Vec3 p(pv[i * 3], pv[i * 3 + 1], pv[i * 3 + 2]);
    if (!grid.contains(p))
      throw OutOfBoundsError("trilinear_sample: point outside grid");
    int cell[3];
    double frac[3];
    grid.locate(p, cell, frac);
    for (int a = 0; a < 3; ++a) fr[i * 3 + a] = frac[a];
    for (int c = 0; c < 8; ++c) {
      const int bx = (c >> 2) & 1, by = (c >> 1) & 1, bz = c & 1;
      corner[i * 8 + c] =
          grid.node_index(cell[0] + bx, cell[1] + by, cell[2] + bz);
    }
  }

  Tensor out = Tensor::zeros(
      {static_cast<int>(n), fd},
      grid.features.requires_grad() || points.requires_grad());
  {
    const double* feat = grid.features.data();
    double* ov = out.data();
    for (std::int64_t i = 0; i < n; ++i) {
      const double fx = fr[i * 3], fy = fr[i * 3 + 1], fz = fr[i * 3 + 2];
      for (int c = 0; c < 8; ++c) {
        const int bx = (c >> 2) & 1, by = (c >> 1) & 1, bz = c & 1;
        const double w = (bx ? fx : 1.0 - fx) * (by ? fy : 1.0 - fy) *
                         (bz ? fz : 1.0 - fz);
        const double* src = feat + corner[i * 8 + c] * fd;
        double* dst = ov + i * fd;
        for (int k = 0; k < fd; ++k) dst[k] += w * src[k];
      }
    }
  }

  if (tape && out.requires_grad()) {
    Tensor feats = grid.features, pts = points, oc = out;
    const double side = grid.side;
    tape->record(out, [feats, pts, oc, corner, fr, n, fd, side]() mutable {
      const double* go = oc.grad();
      double* gfeat = feats.requires_grad() ? feats.grad_mutable() : nullptr;
      double* gpts = pts.requires_grad() ? pts.grad_mutable() : nullptr;
      if (!go) return;
      const double* feat = feats.data();
      for (std::int64_t i = 0; i < n; ++i) {
        const double f[3] = {fr[i * 3], fr[i * 3 + 1], fr[i * 3 + 2]};
        const double* grow = go + i * fd;
        for (int c = 0; c < 8; ++c) {
          const int b[3] = {(c >> 2) & 1, (c >> 1) & 1, c & 1};
          const double wx = b[0] ? f[0] : 1.0 - f[0];
          const double wy = b[1] ? f[1] : 1.0 - f[1];
          const double wz = b[2] ? f[2] : 1.0 - f[2];
          const std::int64_t node = corner[i * 8 + c];
          if (gfeat) {
            const double w = wx * wy * wz;
            double* dst = gfeat + node * fd;
            for (int k = 0; k < fd; ++k) dst[k] += w * grow[k];
          }
          if (gpts) {
            // d w / d p = (dw/dfrac) / side, sign from the corner bit
            const double dwx = (b[0] ? 1.0 : -1.0) * wy * wz / side;
            const double dwy = (b[1] ? 1.0 : -1.0) * wx * wz / side;
            const double dwz = (b[2] ? 1.0 : -1.0) * wx * wy / side;
            const double* src = feat + node * fd;
            double dot = 0.0;
            for (int k = 0; k < fd; ++k) dot += grow[k] * src[k];
            gpts[i * 3 + 0] += dot * dwx;
            gpts[i * 3 + 1] += dot * dwy;
            gpts[i * 3 + 2] += dot * dwz;
          }
        }
      }
    });
  }
  return out;
}

}  // namespace gridslam::scene
