#pragma once

#include <functional>
#include <vector>

#include "gridslam/diffmath/tensor.hpp"

namespace gridslam::diffmath {

// Ordered record of the backward closures of every primitive recorded under
// it. backward() seeds d(loss)/d(loss)=1 and replays the closures once, in
// reverse order. Single-owner during a forward/backward pass.
class Tape {
 public:
  void record(Tensor output, std::function<void()> backward_fn) {
    outputs_.push_back(std::move(output));
    ops_.push_back(std::move(backward_fn));
  }

  // loss must be scalar and produced under this tape. Gradients of recorded
  // intermediates are reset each call, so leaf gradients accumulate across
  // repeated calls.
  void backward(Tensor loss);

  std::size_t size() const { return ops_.size(); }
  void clear() {
    ops_.clear();
    outputs_.clear();
  }

 private:
  std::vector<Tensor> outputs_;
  std::vector<std::function<void()>> ops_;
};

}  // namespace gridslam::diffmath
