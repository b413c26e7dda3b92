#pragma once

#include <vector>

#include "gridslam/diffmath/ops.hpp"

namespace gridslam::diffmath {

// Fully-connected network parameters: `widths.size()-1` linear blocks with
// ReLU between them, linear output. Weight layout [in,out], bias [out].
struct MLPParams {
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;

  static constexpr int kBlocks = 5;
  static constexpr int kHiddenWidth = 32;

  // He-initialized network; widths = {in, hidden..., out}.
  static MLPParams create(const std::vector<int>& widths, Rng& rng);
  static MLPParams create_default(int input_width, int output_width, Rng& rng);

  int blocks() const { return static_cast<int>(weights.size()); }
  int input_width() const { return weights.front().dim(0); }
  int output_width() const { return weights.back().dim(1); }

  void set_requires_grad(bool rg);
  std::vector<Tensor> parameters() const;
  MLPParams clone() const;
  void validate() const;  // consecutive block dims must chain
};

// Raw network output (no output squashing); input rows are samples.
Tensor mlp_forward(Tape* tape, const MLPParams& params, const Tensor& input);

// First hidden activation only: relu(input*W0 + b0), with the input given in
// pieces so callers can reuse partial products.
Tensor mlp_tail_from_hidden(Tape* tape, const MLPParams& params,
                            const Tensor& hidden1);

}  // namespace gridslam::diffmath
