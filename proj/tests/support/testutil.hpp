#pragma once

#include <functional>
#include <vector>

#include "gridslam/diffmath/tensor.hpp"

namespace gridslam::testsupport {

using diffmath::Rng;
using diffmath::Tensor;

inline double rel_err(double analytic, double numeric) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

// Central-difference check of d(objective)/d(param) against the analytic
// gradient. `objective` must re-evaluate from the tensor's current values.
inline double max_grad_rel_err(const std::function<double()>& objective,
                               Tensor param,
                               const std::vector<double>& analytic,
                               double h = 1e-5) {
  double worst = 0.0;
  double* p = param.data();
  for (std::int64_t i = 0; i < param.numel(); ++i) {
    const double keep = p[i];
    p[i] = keep + h;
    const double fp = objective();
    p[i] = keep - h;
    const double fm = objective();
    p[i] = keep;
    const double numeric = (fp - fm) / (2.0 * h);
    worst = std::max(worst, rel_err(analytic[i], numeric));
  }
  return worst;
}

// Directional-derivative check: <grad, dir> against a central difference
// along dir. Scales like the full gradient, so it is robust for entries
// whose individual magnitudes are tiny.
inline double jvp_rel_err(const std::function<double()>& objective,
                          Tensor param, const std::vector<double>& analytic,
                          const std::vector<double>& dir, double h = 1e-6) {
  double* p = param.data();
  double proj = 0.0;
  for (std::int64_t i = 0; i < param.numel(); ++i)
    proj += analytic[i] * dir[i];
  std::vector<double> keep(p, p + param.numel());
  for (std::int64_t i = 0; i < param.numel(); ++i) p[i] = keep[i] + h * dir[i];
  const double fp = objective();
  for (std::int64_t i = 0; i < param.numel(); ++i) p[i] = keep[i] - h * dir[i];
  const double fm = objective();
  for (std::int64_t i = 0; i < param.numel(); ++i) p[i] = keep[i];
  return rel_err(proj, (fp - fm) / (2.0 * h));
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double lo,
                                         double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace gridslam::testsupport
