#include "gridslam/diffmath/adam.hpp"

#include <cmath>

namespace gridslam::diffmath {

namespace {

void ensure_state(AdamState& state, std::int64_t n) {
  if (static_cast<std::int64_t>(state.m.size()) != n) state.reset(n);
}

}  // namespace

void adam_step(Tensor& param, const double* grad, AdamState& state,
               const AdamConfig& cfg) {
  const std::int64_t n = param.numel();
  ensure_state(state, n);
  state.step_count += 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, double(state.step_count));
  const double c2 = 1.0 - std::pow(cfg.beta2, double(state.step_count));
  double* p = param.data();
  for (std::int64_t i = 0; i < n; ++i) {
    const double g = grad ? grad[i] : 0.0;
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

void adam_step_masked(Tensor& param, const double* grad, AdamState& state,
                      const AdamConfig& cfg,
                      const std::vector<std::int64_t>& indices) {
  const std::int64_t n = param.numel();
  ensure_state(state, n);
  state.step_count += 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, double(state.step_count));
  const double c2 = 1.0 - std::pow(cfg.beta2, double(state.step_count));
  double* p = param.data();
  for (std::int64_t i : indices) {
    const double g = grad ? grad[i] : 0.0;
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

void AdamOptimizer::add_param(Tensor param, AdamConfig cfg,
                              std::optional<std::vector<std::int64_t>> mask) {
  Entry e;
  e.param = std::move(param);
  e.cfg = cfg;
  e.mask = std::move(mask);
  entries_.push_back(std::move(e));
}

void AdamOptimizer::step() {
  for (auto& e : entries_) {
    const double* g = e.param.grad();
    if (e.mask)
      adam_step_masked(e.param, g, e.state, e.cfg, *e.mask);
    else
      adam_step(e.param, g, e.state, e.cfg);
  }
}

void AdamOptimizer::zero_grad() {
  for (auto& e : entries_) e.param.zero_grad();
}

}  // namespace gridslam::diffmath
