#include "gridslam/diffmath/mlp.hpp"

#include <cmath>

namespace gridslam::diffmath {

MLPParams MLPParams::create(const std::vector<int>& widths, Rng& rng) {
  if (widths.size() < 2) throw ShapeError("mlp needs at least one block");
  MLPParams p;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const double sigma = std::sqrt(2.0 / widths[i]);
    p.weights.push_back(Tensor::randn({widths[i], widths[i + 1]}, rng, sigma));
    p.biases.push_back(Tensor::zeros({widths[i + 1]}));
  }
  return p;
}

MLPParams MLPParams::create_default(int input_width, int output_width,
                                    Rng& rng) {
  std::vector<int> widths{input_width};
  for (int i = 0; i < kBlocks - 1; ++i) widths.push_back(kHiddenWidth);
  widths.push_back(output_width);
  return create(widths, rng);
}

void MLPParams::set_requires_grad(bool rg) {
  for (auto& w : weights) w.set_requires_grad(rg);
  for (auto& b : biases) b.set_requires_grad(rg);
}

std::vector<Tensor> MLPParams::parameters() const {
  std::vector<Tensor> out;
  for (const auto& w : weights) out.push_back(w);
  for (const auto& b : biases) out.push_back(b);
  return out;
}

MLPParams MLPParams::clone() const {
  MLPParams p;
  for (const auto& w : weights) p.weights.push_back(w.clone());
  for (const auto& b : biases) p.biases.push_back(b.clone());
  return p;
}

void MLPParams::validate() const {
  if (weights.size() != biases.size())
    throw ShapeError("mlp weight/bias count mismatch");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (biases[i].numel() != weights[i].dim(1))
      throw ShapeError("mlp bias width mismatch");
    if (i + 1 < weights.size() && weights[i].dim(1) != weights[i + 1].dim(0))
      throw ShapeError("mlp block widths do not chain");
  }
}

Tensor mlp_forward(Tape* tape, const MLPParams& params, const Tensor& input) {
  if (input.ndim() != 2 || input.dim(1) != params.input_width())
    throw ShapeError("mlp input width mismatch");
  Tensor h = input;
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    h = add_rowvec(tape, matmul(tape, h, params.weights[i]), params.biases[i]);
    if (i + 1 < params.weights.size()) h = relu(tape, h);
  }
  return h;
}

Tensor mlp_tail_from_hidden(Tape* tape, const MLPParams& params,
                            const Tensor& hidden1) {
  Tensor h = relu(tape, hidden1);
  for (std::size_t i = 1; i < params.weights.size(); ++i) {
    h = add_rowvec(tape, matmul(tape, h, params.weights[i]), params.biases[i]);
    if (i + 1 < params.weights.size()) h = relu(tape, h);
  }
  return h;
}

}  // namespace gridslam::diffmath
