#pragma once

#include <optional>

#include "gridslam/data_io/image.hpp"
#include "gridslam/render/sampler.hpp"
#include "gridslam/scene/frustum.hpp"
#include "gridslam/scene/scene.hpp"

namespace gridslam::render {

using diffmath::Tape;
using diffmath::Tensor;
using scene::HierarchicalScene;

struct RenderFlags {
  bool coarse = true;
  bool fine = true;
  bool color = true;
};

// Fixed-size bundle of rays sharing one camera. Sample depths are constants;
// origins/dirs are graph tensors when a pose delta is attached.
struct RayBatch {
  int n_rays = 0;
  int n_samples = 0;
  Tensor origins;           // [R,3]
  Tensor dirs;              // [R,3] unit
  Tensor depth_col;         // [R*N,1] constants, distance along the unit ray
  Tensor depth_mat;         // [R,N] same values
  std::vector<double> obs_depth;  // per ray, ray-length space, 0 = invalid
  std::vector<double> obs_color;  // R*3
  std::vector<int> pix_u, pix_v;
};

// Eq.-style per-ray integration of sample occupancies: termination weights,
// expected depth, and depth variance about it.
struct Composited {
  Tensor depth, var, weights;
};
Composited composite(Tape* tape, const Tensor& occ_mat,
                     const Tensor& depth_mat);

struct RenderResult {
  Tensor depth_c, var_c;          // [R,1]
  Tensor depth_f, var_f;          // [R,1]
  Tensor color;                   // [R,3]
  Tensor weights_c, weights_f;    // [R,N]
};

// Drops mapping samples whose containing voxel is not fully inside the
// frame's frustum mask on either geometry grid (no trilinear support outside
// the masked nodes).
struct SampleFilter {
  const scene::FeatureGrid* mid = nullptr;
  const scene::FrustumMask* mid_mask = nullptr;
  const scene::FeatureGrid* fine = nullptr;
  const scene::FrustumMask* fine_mask = nullptr;

  bool keep(const Vec3& p) const;
};

// Builds a batch for one frame. Pixels whose rays produce no samples (or fail
// the filter) are skipped; the batch may hold fewer rays than requested.
// With a non-null delta the origins/dirs are differentiable w.r.t. it.
RayBatch build_ray_batch(Tape* tape, const Intrinsics& intr,
                         const diffmath::CameraPose& pose,
                         const Tensor* delta,
                         const std::vector<std::pair<int, int>>& pixels,
                         const data_io::Image& color,
                         const data_io::DepthImage& depth, const Aabb& bounds,
                         const SampleConfig& cfg, diffmath::Rng& rng,
                         const SampleFilter* filter = nullptr);

RenderResult render_batch(Tape* tape, const HierarchicalScene& s,
                          const RayBatch& batch, const RenderFlags& flags = {});

// Single-ray convenience over explicit sample depths (distances along the
// unit direction).
RenderResult render_ray(Tape* tape, const HierarchicalScene& s, const Ray& ray,
                        const std::vector<double>& sample_depths,
                        const RenderFlags& flags = {});

}  // namespace gridslam::render
