#include "gridslam/render/renderer.hpp"

namespace gridslam::render {

using namespace diffmath;

bool SampleFilter::keep(const Vec3& p) const {
  auto voxel_ok = [&](const scene::FeatureGrid* g,
                      const scene::FrustumMask* m) {
    if (!g || !m) return true;
    if (!g->contains(p)) return false;
    int cell[3];
    double frac[3];
    g->locate(p, cell, frac);
    return m->voxel_fully_inside(*g, cell[0], cell[1], cell[2]);
  };
  return voxel_ok(mid, mid_mask) && voxel_ok(fine, fine_mask);
}

RayBatch build_ray_batch(Tape* tape, const Intrinsics& intr,
                         const CameraPose& pose, const Tensor* delta,
                         const std::vector<std::pair<int, int>>& pixels,
                         const data_io::Image& color,
                         const data_io::DepthImage& depth, const Aabb& bounds,
                         const SampleConfig& cfg, Rng& rng,
                         const SampleFilter* filter) {
  RayBatch b;
  b.n_samples = cfg.n_strat + cfg.n_imp;

  std::vector<double> dircam;  // unit camera-frame directions
  std::vector<double> depths;
  for (const auto& [u, v] : pixels) {
    Ray ray = cast_ray(intr, pose, u + 0.5, v + 0.5);
    ray.depth = depth.at(u, v);
    auto samples = sample_along_ray(ray, bounds, cfg, rng);
    if (!samples) continue;
    if (filter) {
      bool ok = true;
      for (double d : *samples)
        if (!filter->keep(ray.origin + d * ray.dir)) {
          ok = false;
          break;
        }
      if (!ok) continue;
    }
    const Vec3 dc = intr.backproject(u + 0.5, v + 0.5) / ray.ray_scale;
    dircam.insert(dircam.end(), {dc.x(), dc.y(), dc.z()});
    depths.insert(depths.end(), samples->begin(), samples->end());
    b.obs_depth.push_back(ray.depth > 0 ? ray.depth * ray.ray_scale : 0.0);
    const double* rgb = color.at(u, v);
    b.obs_color.insert(b.obs_color.end(), {rgb[0], rgb[1], rgb[2]});
    b.pix_u.push_back(u);
    b.pix_v.push_back(v);
    ++b.n_rays;
  }

  if (b.n_rays == 0) return b;

  Tensor dircam_t =
      Tensor::from_values({b.n_rays, 3}, std::move(dircam));
  if (delta) {
    PoseGraph pg = pose_apply_delta(tape, pose, *delta);
    b.dirs = matmul(tape, dircam_t, pg.rotation, false, true);
    b.origins = repeat_rows(tape, pg.translation, b.n_rays);
  } else {
    Tensor rot = Tensor::from_values(
        {3, 3}, {pose.R(0, 0), pose.R(0, 1), pose.R(0, 2), pose.R(1, 0),
                 pose.R(1, 1), pose.R(1, 2), pose.R(2, 0), pose.R(2, 1),
                 pose.R(2, 2)});
    b.dirs = matmul(nullptr, dircam_t, rot, false, true);
    b.origins = Tensor::zeros({b.n_rays, 3});
    for (int r = 0; r < b.n_rays; ++r)
      for (int a = 0; a < 3; ++a) b.origins.data()[r * 3 + a] = pose.t(a);
  }

  b.depth_col = Tensor::from_values({b.n_rays * b.n_samples, 1}, depths);
  b.depth_mat =
      Tensor::from_values({b.n_rays, b.n_samples}, std::move(depths));
  return b;
}

namespace {

// color channel c of [R*N,3] -> [R,N]
Tensor channel_mat(Tape* tape, const Tensor& x, int ch, int rays, int n) {
  return reshape(tape, slice_cols(tape, x, ch, ch + 1), {rays, n});
}

}  // namespace

Composited composite(Tape* tape, const Tensor& occ_mat,
                     const Tensor& depth_mat) {
  Composited lr;
  lr.weights = termination_weights(tape, occ_mat);
  lr.depth = rowwise_sum(tape, mul_const(tape, lr.weights, depth_mat));
  Tensor dev = sub_col(tape, depth_mat, lr.depth);
  lr.var = rowwise_sum(tape, mul(tape, lr.weights, square(tape, dev)));
  return lr;
}

RenderResult render_batch(Tape* tape, const HierarchicalScene& s,
                          const RayBatch& batch, const RenderFlags& flags) {
  const int R = batch.n_rays;
  const int N = batch.n_samples;
  RenderResult out;
  if (R == 0) return out;

  Tensor o_up = repeat_rows(tape, batch.origins, N);
  Tensor d_up = repeat_rows(tape, batch.dirs, N);
  Tensor points =
      add(tape, o_up, mul_col(tape, d_up, batch.depth_col));

  if (flags.fine || flags.color) {
    // the color integral reuses the fine-level termination weights
    {
      scene::FineQuery q = scene::occupancy_fine(tape, s, points);
      Tensor occ_mat = reshape(tape, q.occ, {R, N});
      Composited lr = composite(tape, occ_mat, batch.depth_mat);
      out.depth_f = lr.depth;
      out.var_f = lr.var;
      out.weights_f = lr.weights;
    }
    if (flags.color) {
      Tensor c = scene::color_query(tape, s, points);  // [R*N,3]
      std::vector<Tensor> chans;
      for (int ch = 0; ch < 3; ++ch) {
        Tensor cm = channel_mat(tape, c, ch, R, N);
        chans.push_back(
            rowwise_sum(tape, mul(tape, out.weights_f, cm)));
      }
      out.color = concat_cols(tape, chans);
    }
  }
  if (flags.coarse) {
    Tensor occ0 = scene::occupancy_coarse(tape, s, points);
    Tensor occ_mat = reshape(tape, occ0, {R, N});
    Composited lr = composite(tape, occ_mat, batch.depth_mat);
    out.depth_c = lr.depth;
    out.var_c = lr.var;
    out.weights_c = lr.weights;
  }
  return out;
}

RenderResult render_ray(Tape* tape, const HierarchicalScene& s, const Ray& ray,
                        const std::vector<double>& sample_depths,
                        const RenderFlags& flags) {
  if (sample_depths.empty())
    throw ContractError("render_ray requires a non-empty sample set");
  RayBatch b;
  b.n_rays = 1;
  b.n_samples = static_cast<int>(sample_depths.size());
  b.origins =
      Tensor::from_values({1, 3}, {ray.origin.x(), ray.origin.y(), ray.origin.z()});
  b.dirs = Tensor::from_values({1, 3}, {ray.dir.x(), ray.dir.y(), ray.dir.z()});
  b.depth_col = Tensor::from_values({b.n_samples, 1}, sample_depths);
  b.depth_mat = Tensor::from_values({1, b.n_samples}, sample_depths);
  b.obs_depth = {ray.depth > 0 ? ray.depth * ray.ray_scale : 0.0};
  b.obs_color = {ray.color.x(), ray.color.y(), ray.color.z()};
  return render_batch(tape, s, b, flags);
}

}  // namespace gridslam::render
