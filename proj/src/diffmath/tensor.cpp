#include "gridslam/diffmath/tensor.hpp"

namespace gridslam::diffmath {

Tensor Tensor::make(Shape shape, std::vector<double> v, bool rg) {
  auto d = std::make_shared<Data>();
  if (shape_numel(shape) != static_cast<std::int64_t>(v.size()))
    throw ShapeError("tensor value count does not match shape");
  d->shape = std::move(shape);
  d->v = std::move(v);
  d->requires_grad = rg;
  return Tensor(std::move(d));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  std::vector<double> v(shape_numel(shape), 0.0);
  return make(std::move(shape), std::move(v), requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  std::vector<double> v(shape_numel(shape), value);
  return make(std::move(shape), std::move(v), requires_grad);
}

Tensor Tensor::from_values(Shape shape, std::vector<double> values,
                           bool requires_grad) {
  return make(std::move(shape), std::move(values), requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return make({1}, {v}, requires_grad);
}

Tensor Tensor::randn(Shape shape, Rng& rng, double sigma, bool requires_grad) {
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = dist(rng);
  return make(std::move(shape), std::move(v), requires_grad);
}

double Tensor::value() const {
  if (!d_ || d_->v.size() != 1)
    throw ContractError("value() requires a scalar tensor");
  return d_->v[0];
}

Tensor& Tensor::set_requires_grad(bool rg) {
  d_->requires_grad = rg;
  return *this;
}

double* Tensor::grad_mutable() {
  if (d_->g.empty()) d_->g.assign(d_->v.size(), 0.0);
  return d_->g.data();
}

std::vector<double> Tensor::grad_vector() const {
  if (d_->g.empty()) return std::vector<double>(d_->v.size(), 0.0);
  return d_->g;
}

void Tensor::zero_grad() {
  if (d_) d_->g.clear();
}

Tensor Tensor::clone() const {
  return make(d_->shape, d_->v, d_->requires_grad);
}

Tensor Tensor::detached() const {
  return make(d_->shape, d_->v, false);
}

}  // namespace gridslam::diffmath
