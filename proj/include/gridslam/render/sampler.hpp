#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gridslam/diffmath/tensor.hpp"
#include "gridslam/render/camera.hpp"

namespace gridslam::render {

using diffmath::Rng;

struct SampleConfig {
  int n_strat = 32;
  int n_imp = 16;
  double near = 0.05;
  double depth_band = 0.05;      // importance band half-width, fraction of D
  double far_clip_scale = 1.2;   // far = min(bounds exit, scale * D)
  double bound_margin = 1e-3;    // keeps samples strictly inside the bounds
};

// Sample distances along the unit ray, sorted ascending. Depths here are
// distances along the ray (the observed z-depth is converted by the caller
// via ray_scale). Returns nullopt when the ray misses the bounds and carries
// no depth, or the usable interval is empty.
std::optional<std::vector<double>> sample_along_ray(
    const Ray& ray, const Aabb& bounds, const SampleConfig& cfg, Rng& rng);

// Same, with an injectable uniform [0,1) draw (deterministic schedules in
// tests).
std::optional<std::vector<double>> sample_along_ray_with(
    const Ray& ray, const Aabb& bounds, const SampleConfig& cfg,
    const std::function<double()>& draw);

}  // namespace gridslam::render
