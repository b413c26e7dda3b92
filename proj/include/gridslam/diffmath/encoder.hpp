#pragma once

#include "gridslam/diffmath/ops.hpp"

namespace gridslam::diffmath {

// Gaussian positional encoding: [sin(2*pi*B*p); cos(2*pi*B*p); p], with a
// learnable frequency matrix B drawn from N(0, sigma^2).
struct GaussianEncoder {
  Tensor freq;  // [n_freq, 3]
  bool append_raw = true;

  static GaussianEncoder create(int n_freq, double sigma, Rng& rng);

  int n_freq() const { return freq.dim(0); }
  int output_dim() const { return 2 * n_freq() + (append_raw ? 3 : 0); }
  GaussianEncoder clone() const;
};

// points: [n,3] -> [n, output_dim]; differentiable w.r.t. points and freq.
Tensor positional_encode(Tape* tape, const GaussianEncoder& enc,
                         const Tensor& points);

}  // namespace gridslam::diffmath
