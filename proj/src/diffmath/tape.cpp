#include "gridslam/diffmath/tape.hpp"

namespace gridslam::diffmath {

void Tape::backward(Tensor loss) {
  if (loss.numel() != 1)
    throw ContractError("backward expects a scalar loss");
  for (auto& out : outputs_) out.zero_grad();
  loss.grad_mutable()[0] = 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

}  // namespace gridslam::diffmath
