#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridslam/diffmath/tensor.hpp"

namespace gridslam::diffmath {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment accumulators for one parameter tensor.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step_count = 0;

  void reset(std::int64_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    step_count = 0;
  }
};

// In-place update of all entries. grad length must match param.
void adam_step(Tensor& param, const double* grad, AdamState& state,
               const AdamConfig& cfg);

// Update restricted to the given flat indices; everything else, including the
// moment entries, stays bit-identical.
void adam_step_masked(Tensor& param, const double* grad, AdamState& state,
                      const AdamConfig& cfg,
                      const std::vector<std::int64_t>& indices);

// Convenience bundle: several tensors with per-tensor rate and optional mask.
class AdamOptimizer {
 public:
  void add_param(Tensor param, AdamConfig cfg,
                 std::optional<std::vector<std::int64_t>> mask = std::nullopt);
  void step();        // uses each tensor's current gradient
  void zero_grad();   // clears gradients of all managed tensors
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    Tensor param;
    AdamConfig cfg;
    AdamState state;
    std::optional<std::vector<std::int64_t>> mask;
  };
  std::vector<Entry> entries_;
};

}  // namespace gridslam::diffmath
