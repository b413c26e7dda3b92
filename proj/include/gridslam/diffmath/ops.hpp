#pragma once

#include <vector>

#include "gridslam/diffmath/tape.hpp"
#include "gridslam/diffmath/tensor.hpp"

// Differentiable primitives. Every op takes the recording tape first; pass
// nullptr to evaluate without recording. Tensors are treated as row-major
// matrices; 1-D tensors act as single rows or columns where noted.
namespace gridslam::diffmath {

Tensor matmul(Tape* tape, const Tensor& a, const Tensor& b,
              bool trans_a = false, bool trans_b = false);

// y = x + b, b broadcast across rows ([n] against [m,n]).
Tensor add_rowvec(Tape* tape, const Tensor& x, const Tensor& b);

Tensor add(Tape* tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape* tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape* tape, const Tensor& a, const Tensor& b);
Tensor div(Tape* tape, const Tensor& a, const Tensor& b);

Tensor scale(Tape* tape, const Tensor& x, double c);
Tensor add_scalar(Tape* tape, const Tensor& x, double c);

Tensor relu(Tape* tape, const Tensor& x);
Tensor sigmoid(Tape* tape, const Tensor& x);
Tensor abs_op(Tape* tape, const Tensor& x);
Tensor sqrt_op(Tape* tape, const Tensor& x);
Tensor square(Tape* tape, const Tensor& x);
Tensor sin_op(Tape* tape, const Tensor& x);
Tensor cos_op(Tape* tape, const Tensor& x);

Tensor concat_cols(Tape* tape, const std::vector<Tensor>& parts);
Tensor slice_cols(Tape* tape, const Tensor& x, int c0, int c1);
// Rows [r0, r1) of a 2-D tensor, or entries of a 1-D tensor.
Tensor slice_rows(Tape* tape, const Tensor& x, std::int64_t r0,
                  std::int64_t r1);

// Copy with a new shape of equal element count.
Tensor reshape(Tape* tape, const Tensor& x, Shape shape);

// Each row repeated `times` consecutive times: [m,n] -> [m*times,n].
Tensor repeat_rows(Tape* tape, const Tensor& x, int times);

Tensor rowwise_sum(Tape* tape, const Tensor& x);              // [m,n] -> [m,1]
Tensor sub_col(Tape* tape, const Tensor& x, const Tensor& c); // x - c*1^T
Tensor mul_col(Tape* tape, const Tensor& x, const Tensor& c); // x .* (c*1^T)

Tensor sum(Tape* tape, const Tensor& x);
Tensor mean(Tape* tape, const Tensor& x);
// Scalar sum_i w[i]*x[i] with constant weights (no gradient to w).
Tensor weighted_sum(Tape* tape, const Tensor& x, const std::vector<double>& w);

// Elementwise subtraction of a constant tensor (no gradient to c).
Tensor sub_const(Tape* tape, const Tensor& x, const Tensor& c);
Tensor mul_const(Tape* tape, const Tensor& x, const Tensor& c);

// Numerically stable binary cross-entropy against constant 0/1 labels,
// evaluated on logits; returns per-entry losses.
Tensor bce_with_logits(Tape* tape, const Tensor& logits,
                       const std::vector<double>& labels);

// Ray-termination weights w_i = o_i * prod_{j<i} (1 - o_j), rows = rays.
Tensor termination_weights(Tape* tape, const Tensor& occupancy);

// Analytic even functions of s = theta^2 used by the rotation exponential:
// sinc_sqrt(s) = sin(sqrt(s))/sqrt(s), versine_ratio(s) = (1-cos(sqrt(s)))/s.
// Series branches keep value and derivative exact through s = 0.
Tensor sinc_sqrt(Tape* tape, const Tensor& s);
Tensor versine_ratio(Tape* tape, const Tensor& s);

}  // namespace gridslam::diffmath
