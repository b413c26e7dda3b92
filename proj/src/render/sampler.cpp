#include "gridslam/render/sampler.hpp"

#include <algorithm>

namespace gridslam::render {

std::optional<std::vector<double>> sample_along_ray_with(
    const Ray& ray, const Aabb& bounds, const SampleConfig& cfg,
    const std::function<double()>& draw) {
  double t0, t1;
  if (!intersect_aabb(ray.origin, ray.dir, bounds, t0, t1)) return std::nullopt;

  const double depth_ray = ray.depth > 0.0 ? ray.depth * ray.ray_scale : 0.0;
  double near = std::max(cfg.near, t0 + cfg.bound_margin);
  double far = t1 - cfg.bound_margin;
  if (depth_ray > 0.0) far = std::min(far, cfg.far_clip_scale * depth_ray);
  if (far <= near) return std::nullopt;

  std::vector<double> d;
  d.reserve(cfg.n_strat + cfg.n_imp);

  int extra_strat = 0;
  double band_lo = 0.0, band_hi = 0.0;
  if (depth_ray > 0.0) {
    band_lo = std::max((1.0 - cfg.depth_band) * depth_ray, near);
    band_hi = std::min((1.0 + cfg.depth_band) * depth_ray, far);
    if (band_lo >= band_hi) extra_strat = cfg.n_imp;
  } else {
    extra_strat = cfg.n_imp;
  }

  const int n_strat = cfg.n_strat + extra_strat;
  const double w = (far - near) / n_strat;
  for (int i = 0; i < n_strat; ++i) d.push_back(near + (i + draw()) * w);

  if (depth_ray > 0.0 && extra_strat == 0)
    for (int i = 0; i < cfg.n_imp; ++i)
      d.push_back(band_lo + draw() * (band_hi - band_lo));

  std::sort(d.begin(), d.end());
  return d;
}

std::optional<std::vector<double>> sample_along_ray(const Ray& ray,
                                                    const Aabb& bounds,
                                                    const SampleConfig& cfg,
                                                    Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  return sample_along_ray_with(ray, bounds, cfg,
                               [&]() { return u01(rng); });
}

}  // namespace gridslam::render
