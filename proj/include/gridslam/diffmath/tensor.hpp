#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridslam::diffmath {

using Rng = std::mt19937_64;

// Storage dtype tag. Computation is always double; f32 narrows on
// serialization only.
enum class DType { f32, f64 };

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Shape = std::vector<int>;

inline std::int64_t shape_numel(const Shape& s) {
  std::int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

// Dense row-major tensor with shared storage. Value-semantics handle: copies
// alias the same buffer, clone() deep-copies.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor randn(Shape shape, Rng& rng, double sigma = 1.0,
                      bool requires_grad = false);

  bool defined() const { return d_ != nullptr; }
  const Shape& shape() const { return d_->shape; }
  int ndim() const { return static_cast<int>(d_->shape.size()); }
  int dim(int i) const { return d_->shape.at(i); }
  std::int64_t numel() const { return static_cast<std::int64_t>(d_->v.size()); }

  double* data() { return d_->v.data(); }
  const double* data() const { return d_->v.data(); }
  std::vector<double>& values() { return d_->v; }
  const std::vector<double>& values() const { return d_->v; }

  double value() const;  // scalar accessor
  double at(std::int64_t i) const { return d_->v[i]; }

  bool requires_grad() const { return d_ && d_->requires_grad; }
  Tensor& set_requires_grad(bool rg);

  // Gradient buffer; allocated zero-filled on first mutable access.
  bool has_grad() const { return d_ && !d_->g.empty(); }
  double* grad_mutable();
  const double* grad() const { return d_->g.empty() ? nullptr : d_->g.data(); }
  std::vector<double> grad_vector() const;
  void zero_grad();

  Tensor clone() const;  // deep copy of values, no grad, same requires_grad
  Tensor detached() const;

  // True when both handles alias the same storage.
  bool same_storage(const Tensor& other) const { return d_ == other.d_; }

 private:
  struct Data {
    Shape shape;
    std::vector<double> v;
    std::vector<double> g;
    bool requires_grad = false;
  };
  std::shared_ptr<Data> d_;
  explicit Tensor(std::shared_ptr<Data> d) : d_(std::move(d)) {}
  static Tensor make(Shape shape, std::vector<double> v, bool rg);
};

}  // namespace gridslam::diffmath
