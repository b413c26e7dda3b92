#include "gridslam/diffmath/encoder.hpp"

#include <numbers>

namespace gridslam::diffmath {

GaussianEncoder GaussianEncoder::create(int n_freq, double sigma, Rng& rng) {
  GaussianEncoder enc;
  enc.freq = Tensor::randn({n_freq, 3}, rng, sigma);
  return enc;
}

GaussianEncoder GaussianEncoder::clone() const {
  GaussianEncoder enc;
  enc.freq = freq.clone();
  enc.append_raw = append_raw;
  return enc;
}

Tensor positional_encode(Tape* tape, const GaussianEncoder& enc,
                         const Tensor& points) {
  if (points.ndim() != 2 || points.dim(1) != 3)
    throw ShapeError("positional_encode expects [n,3] points");
  Tensor phase =
      scale(tape, matmul(tape, points, enc.freq, false, true),
            2.0 * std::numbers::pi);
  std::vector<Tensor> parts{sin_op(tape, phase), cos_op(tape, phase)};
  if (enc.append_raw) parts.push_back(points);
  return concat_cols(tape, parts);
}

}  // namespace gridslam::diffmath
