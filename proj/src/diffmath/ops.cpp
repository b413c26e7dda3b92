#include "gridslam/diffmath/ops.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace gridslam::diffmath {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using CMatMap = Eigen::Map<const RowMat>;

void require(bool ok, const char* msg) {
  if (!ok) throw ShapeError(msg);
}

std::pair<std::int64_t, std::int64_t> mat_dims(const Tensor& t) {
  require(t.ndim() == 2 || t.ndim() == 1, "expected 1-D or 2-D tensor");
  if (t.ndim() == 1) return {1, t.dim(0)};
  return {t.dim(0), t.dim(1)};
}

bool want_record(Tape* tape, const Tensor& out) {
  return tape != nullptr && out.requires_grad();
}

// Elementwise unary op helper: out = f(x), backward gx += go * dfdx(x, out).
template <typename FwdFn, typename BwdFn>
Tensor unary_op(Tape* tape, const Tensor& x, FwdFn fwd, BwdFn dfdx) {
  std::vector<double> v(x.numel());
  const double* xv = x.data();
  for (std::int64_t i = 0; i < x.numel(); ++i) v[i] = fwd(xv[i]);
  Tensor out = Tensor::from_values(x.shape(), std::move(v), x.requires_grad());
  if (want_record(tape, out)) {
    Tensor xc = x, oc = out;
    tape->record(out, [xc, oc, dfdx]() mutable {
      if (!xc.requires_grad()) return;
      double* gx = xc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      const double* xv = xc.data();
      const double* ov = oc.data();
      for (std::int64_t i = 0; i < xc.numel(); ++i)
        gx[i] += go[i] * dfdx(xv[i], ov[i]);
    });
  }
  return out;
}

}  // namespace

Tensor matmul(Tape* tape, const Tensor& a, const Tensor& b, bool trans_a,
              bool trans_b) {
  require(a.ndim() == 2 && b.ndim() == 2, "matmul expects 2-D tensors");
  const std::int64_t m = trans_a ? a.dim(1) : a.dim(0);
  const std::int64_t k = trans_a ? a.dim(0) : a.dim(1);
  const std::int64_t kb = trans_b ? b.dim(1) : b.dim(0);
  const std::int64_t n = trans_b ? b.dim(0) : b.dim(1);
  require(k == kb, "matmul inner dimensions differ");

  Tensor out = Tensor::zeros({static_cast<int>(m), static_cast<int>(n)},
                             a.requires_grad() || b.requires_grad());
  {
    CMatMap A(a.data(), a.dim(0), a.dim(1));
    CMatMap B(b.data(), b.dim(0), b.dim(1));
    MatMap C(out.data(), m, n);
    if (!trans_a && !trans_b)
      C.noalias() = A * B;
    else if (trans_a && !trans_b)
      C.noalias() = A.transpose() * B;
    else if (!trans_a && trans_b)
      C.noalias() = A * B.transpose();
    else
      C.noalias() = A.transpose() * B.transpose();
  }
  if (want_record(tape, out)) {
    Tensor ac = a, bc = b, oc = out;
    tape->record(out, [ac, bc, oc, trans_a, trans_b]() mutable {
      const double* go = oc.grad();
      if (ac.requires_grad()) ac.grad_mutable();
      if (bc.requires_grad()) bc.grad_mutable();
      if (!go) return;
      CMatMap G(go, oc.dim(0), oc.dim(1));
      CMatMap A(ac.data(), ac.dim(0), ac.dim(1));
      CMatMap B(bc.data(), bc.dim(0), bc.dim(1));
      if (ac.requires_grad()) {
        MatMap GA(ac.grad_mutable(), ac.dim(0), ac.dim(1));
        if (!trans_a && !trans_b)
          GA.noalias() += G * B.transpose();
        else if (!trans_a && trans_b)
          GA.noalias() += G * B;
        else if (trans_a && !trans_b)
          GA.noalias() += B * G.transpose();
        else
          GA.noalias() += B.transpose() * G.transpose();
      }
      if (bc.requires_grad()) {
        MatMap GB(bc.grad_mutable(), bc.dim(0), bc.dim(1));
        if (!trans_a && !trans_b)
          GB.noalias() += A.transpose() * G;
        else if (!trans_a && trans_b)
          GB.noalias() += G.transpose() * A;
        else if (trans_a && !trans_b)
          GB.noalias() += A * G;
        else
          GB.noalias() += G.transpose() * A.transpose();
      }
    });
  }
  return out;
}

Tensor add_rowvec(Tape* tape, const Tensor& x, const Tensor& b) {
  auto [m, n] = mat_dims(x);
  require(b.numel() == n, "bias width does not match");
  Tensor out = Tensor::zeros(x.shape(), x.requires_grad() || b.requires_grad());
  const double* xv = x.data();
  const double* bv = b.data();
  double* ov = out.data();
  for (std::int64_t r = 0; r < m; ++r)
    for (std::int64_t c = 0; c < n; ++c) ov[r * n + c] = xv[r * n + c] + bv[c];
  if (want_record(tape, out)) {
    Tensor xc = x, bcap = b, oc = out;
    tape->record(out, [xc, bcap, oc, m, n]() mutable {
      const double* go = oc.grad();
      if (xc.requires_grad()) {
        double* gx = xc.grad_mutable();
        if (go)
          for (std::int64_t i = 0; i < m * n; ++i) gx[i] += go[i];
      }
      if (bcap.requires_grad()) {
        double* gb = bcap.grad_mutable();
        if (go)
          for (std::int64_t r = 0; r < m; ++r)
            for (std::int64_t c = 0; c < n; ++c) gb[c] += go[r * n + c];
      }
    });
  }
  return out;
}

namespace {

template <typename Fwd, typename BwdA, typename BwdB>
Tensor binary_op(Tape* tape, const Tensor& a, const Tensor& b, Fwd fwd,
                 BwdA dfda, BwdB dfdb) {
  require(a.shape() == b.shape(), "elementwise op shape mismatch");
  std::vector<double> v(a.numel());
  const double* av = a.data();
  const double* bv = b.data();
  for (std::int64_t i = 0; i < a.numel(); ++i) v[i] = fwd(av[i], bv[i]);
  Tensor out = Tensor::from_values(a.shape(), std::move(v),
                                   a.requires_grad() || b.requires_grad());
  if (want_record(tape, out)) {
    Tensor ac = a, bc = b, oc = out;
    tape->record(out, [ac, bc, oc, dfda, dfdb]() mutable {
      const double* go = oc.grad();
      const double* av = ac.data();
      const double* bv = bc.data();
      if (ac.requires_grad()) {
        double* ga = ac.grad_mutable();
        if (go)
          for (std::int64_t i = 0; i < ac.numel(); ++i)
            ga[i] += go[i] * dfda(av[i], bv[i]);
      }
      if (bc.requires_grad()) {
        double* gb = bc.grad_mutable();
        if (go)
          for (std::int64_t i = 0; i < bc.numel(); ++i)
            gb[i] += go[i] * dfdb(av[i], bv[i]);
      }
    });
  }
  return out;
}

}  // namespace

Tensor add(Tape* tape, const Tensor& a, const Tensor& b) {
  return binary_op(
      tape, a, b, [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(Tape* tape, const Tensor& a, const Tensor& b) {
  return binary_op(
      tape, a, b, [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(Tape* tape, const Tensor& a, const Tensor& b) {
  return binary_op(
      tape, a, b, [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor div(Tape* tape, const Tensor& a, const Tensor& b) {
  return binary_op(
      tape, a, b, [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

Tensor scale(Tape* tape, const Tensor& x, double c) {
  return unary_op(
      tape, x, [c](double v) { return v * c; },
      [c](double, double) { return c; });
}

Tensor add_scalar(Tape* tape, const Tensor& x, double c) {
  return unary_op(
      tape, x, [c](double v) { return v + c; },
      [](double, double) { return 1.0; });
}

Tensor relu(Tape* tape, const Tensor& x) {
  return unary_op(
      tape, x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(Tape* tape, const Tensor& x) {
  return unary_op(
      tape, x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double o) { return o * (1.0 - o); });
}

Tensor abs_op(Tape* tape, const Tensor& x) {
  return unary_op(
      tape, x, [](double v) { return std::abs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor sqrt_op(Tape* tape, const Tensor& x) {
  return unary_op(
      tape, x, [](double v) { return std::sqrt(v); },
      [](double, double o) { return 0.5 / o; });
}

Tensor square(Tape* tape, const Tensor& x) {
  return unary_op(
      tape, x, [](double v) { return v * v; },
      [](double v, double) { return 2.0 * v; });
}

Tensor sin_op(Tape* tape, const Tensor& x) {
  return unary_op(
      tape, x, [](double v) { return std::sin(v); },
      [](double v, double) { return std::cos(v); });
}

Tensor cos_op(Tape* tape, const Tensor& x) {
  return unary_op(
      tape, x, [](double v) { return std::cos(v); },
      [](double v, double) { return -std::sin(v); });
}

Tensor concat_cols(Tape* tape, const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat of nothing");
  auto [m, n0] = mat_dims(parts[0]);
  std::int64_t total = 0;
  bool rg = false;
  for (const auto& p : parts) {
    auto [pm, pn] = mat_dims(p);
    require(pm == m, "concat_cols row mismatch");
    total += pn;
    rg = rg || p.requires_grad();
  }
  (void)n0;
  Tensor out =
      Tensor::zeros({static_cast<int>(m), static_cast<int>(total)}, rg);
  double* ov = out.data();
  std::int64_t off = 0;
  for (const auto& p : parts) {
    auto [pm, pn] = mat_dims(p);
    (void)pm;
    const double* pv = p.data();
    for (std::int64_t r = 0; r < m; ++r)
      for (std::int64_t c = 0; c < pn; ++c)
        ov[r * total + off + c] = pv[r * pn + c];
    off += pn;
  }
  if (want_record(tape, out)) {
    std::vector<Tensor> pc = parts;
    Tensor oc = out;
    tape->record(out, [pc, oc, m, total]() mutable {
      const double* go = oc.grad();
      std::int64_t off = 0;
      for (auto& p : pc) {
        auto [pm, pn] = mat_dims(p);
        (void)pm;
        if (p.requires_grad()) {
          double* gp = p.grad_mutable();
          if (go)
            for (std::int64_t r = 0; r < m; ++r)
              for (std::int64_t c = 0; c < pn; ++c)
                gp[r * pn + c] += go[r * total + off + c];
        }
        off += pn;
      }
    });
  }
  return out;
}

Tensor slice_cols(Tape* tape, const Tensor& x, int c0, int c1) {
  auto [m, n] = mat_dims(x);
  require(0 <= c0 && c0 < c1 && c1 <= n, "slice_cols out of range");
  const std::int64_t w = c1 - c0;
  Tensor out =
      Tensor::zeros({static_cast<int>(m), static_cast<int>(w)}, x.requires_grad());
  const double* xv = x.data();
  double* ov = out.data();
  for (std::int64_t r = 0; r < m; ++r)
    for (std::int64_t c = 0; c < w; ++c) ov[r * w + c] = xv[r * n + c0 + c];
  if (want_record(tape, out)) {
    Tensor xc = x, oc = out;
    tape->record(out, [xc, oc, m, n, w, c0]() mutable {
      if (!xc.requires_grad()) return;
      double* gx = xc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      for (std::int64_t r = 0; r < m; ++r)
        for (std::int64_t c = 0; c < w; ++c)
          gx[r * n + c0 + c] += go[r * w + c];
    });
  }
  return out;
}

Tensor slice_rows(Tape* tape, const Tensor& x, std::int64_t r0,
                  std::int64_t r1) {
  auto [m, n] = mat_dims(x);
  require(0 <= r0 && r0 < r1 && r1 <= m, "slice_rows out of range");
  const std::int64_t h = r1 - r0;
  Shape out_shape = x.ndim() == 1
                        ? Shape{static_cast<int>(h)}
                        : Shape{static_cast<int>(h), static_cast<int>(n)};
  Tensor out = Tensor::zeros(out_shape, x.requires_grad());
  const double* xv = x.data();
  double* ov = out.data();
  for (std::int64_t i = 0; i < h * n; ++i) ov[i] = xv[r0 * n + i];
  if (want_record(tape, out)) {
    Tensor xc = x, oc = out;
    tape->record(out, [xc, oc, r0, h, n]() mutable {
      if (!xc.requires_grad()) return;
      double* gx = xc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      for (std::int64_t i = 0; i < h * n; ++i) gx[r0 * n + i] += go[i];
    });
  }
  return out;
}

Tensor reshape(Tape* tape, const Tensor& x, Shape shape) {
  require(shape_numel(shape) == x.numel(), "reshape element count mismatch");
  Tensor out =
      Tensor::from_values(std::move(shape), x.values(), x.requires_grad());
  if (want_record(tape, out)) {
    Tensor xc = x, oc = out;
    tape->record(out, [xc, oc]() mutable {
      if (!xc.requires_grad()) return;
      double* gx = xc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      for (std::int64_t i = 0; i < xc.numel(); ++i) gx[i] += go[i];
    });
  }
  return out;
}

Tensor repeat_rows(Tape* tape, const Tensor& x, int times) {
  auto [m, n] = mat_dims(x);
  Tensor out = Tensor::zeros(
      {static_cast<int>(m * times), static_cast<int>(n)}, x.requires_grad());
  const double* xv = x.data();
  double* ov = out.data();
  for (std::int64_t r = 0; r < m; ++r)
    for (int t = 0; t < times; ++t)
      for (std::int64_t c = 0; c < n; ++c)
        ov[(r * times + t) * n + c] = xv[r * n + c];
  if (want_record(tape, out)) {
    Tensor xc = x, oc = out;
    tape->record(out, [xc, oc, m, n, times]() mutable {
      if (!xc.requires_grad()) return;
      double* gx = xc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      for (std::int64_t r = 0; r < m; ++r)
        for (int t = 0; t < times; ++t)
          for (std::int64_t c = 0; c < n; ++c)
            gx[r * n + c] += go[(r * times + t) * n + c];
    });
  }
  return out;
}

Tensor rowwise_sum(Tape* tape, const Tensor& x) {
  auto [m, n] = mat_dims(x);
  Tensor out = Tensor::zeros({static_cast<int>(m), 1}, x.requires_grad());
  const double* xv = x.data();
  double* ov = out.data();
  for (std::int64_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (std::int64_t c = 0; c < n; ++c) s += xv[r * n + c];
    ov[r] = s;
  }
  if (want_record(tape, out)) {
    Tensor xc = x, oc = out;
    tape->record(out, [xc, oc, m, n]() mutable {
      if (!xc.requires_grad()) return;
      double* gx = xc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      for (std::int64_t r = 0; r < m; ++r)
        for (std::int64_t c = 0; c < n; ++c) gx[r * n + c] += go[r];
    });
  }
  return out;
}

namespace {

template <bool Multiply>
Tensor col_broadcast(Tape* tape, const Tensor& x, const Tensor& c) {
  auto [m, n] = mat_dims(x);
  require(c.numel() == m, "column operand length mismatch");
  Tensor out =
      Tensor::zeros(x.shape(), x.requires_grad() || c.requires_grad());
  const double* xv = x.data();
  const double* cv = c.data();
  double* ov = out.data();
  for (std::int64_t r = 0; r < m; ++r)
    for (std::int64_t col = 0; col < n; ++col)
      ov[r * n + col] = Multiply ? xv[r * n + col] * cv[r]
                                 : xv[r * n + col] - cv[r];
  if (want_record(tape, out)) {
    Tensor xc = x, cc = c, oc = out;
    tape->record(out, [xc, cc, oc, m, n]() mutable {
      const double* go = oc.grad();
      const double* xv = xc.data();
      const double* cv = cc.data();
      if (xc.requires_grad()) {
        double* gx = xc.grad_mutable();
        if (go)
          for (std::int64_t r = 0; r < m; ++r)
            for (std::int64_t col = 0; col < n; ++col)
              gx[r * n + col] +=
                  Multiply ? go[r * n + col] * cv[r] : go[r * n + col];
      }
      if (cc.requires_grad()) {
        double* gc = cc.grad_mutable();
        if (go)
          for (std::int64_t r = 0; r < m; ++r) {
            double s = 0.0;
            for (std::int64_t col = 0; col < n; ++col)
              s += Multiply ? go[r * n + col] * xv[r * n + col]
                            : -go[r * n + col];
            gc[r] += s;
          }
      }
    });
  }
  return out;
}

}  // namespace

Tensor sub_col(Tape* tape, const Tensor& x, const Tensor& c) {
  return col_broadcast<false>(tape, x, c);
}

Tensor mul_col(Tape* tape, const Tensor& x, const Tensor& c) {
  return col_broadcast<true>(tape, x, c);
}

Tensor sum(Tape* tape, const Tensor& x) {
  double s = 0.0;
  const double* xv = x.data();
  for (std::int64_t i = 0; i < x.numel(); ++i) s += xv[i];
  Tensor out = Tensor::scalar(s, x.requires_grad());
  if (want_record(tape, out)) {
    Tensor xc = x, oc = out;
    tape->record(out, [xc, oc]() mutable {
      if (!xc.requires_grad()) return;
      double* gx = xc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      for (std::int64_t i = 0; i < xc.numel(); ++i) gx[i] += go[0];
    });
  }
  return out;
}

Tensor mean(Tape* tape, const Tensor& x) {
  return scale(tape, sum(tape, x), 1.0 / static_cast<double>(x.numel()));
}

Tensor weighted_sum(Tape* tape, const Tensor& x,
                    const std::vector<double>& w) {
  require(static_cast<std::int64_t>(w.size()) == x.numel(),
          "weighted_sum length mismatch");
  double s = 0.0;
  const double* xv = x.data();
  for (std::int64_t i = 0; i < x.numel(); ++i) s += w[i] * xv[i];
  Tensor out = Tensor::scalar(s, x.requires_grad());
  if (want_record(tape, out)) {
    Tensor xc = x, oc = out;
    std::vector<double> wc = w;
    tape->record(out, [xc, oc, wc]() mutable {
      if (!xc.requires_grad()) return;
      double* gx = xc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      for (std::int64_t i = 0; i < xc.numel(); ++i) gx[i] += go[0] * wc[i];
    });
  }
  return out;
}

Tensor sub_const(Tape* tape, const Tensor& x, const Tensor& c) {
  require(x.shape() == c.shape(), "sub_const shape mismatch");
  const double* cv = c.data();
  std::vector<double> v(x.numel());
  const double* xv = x.data();
  for (std::int64_t i = 0; i < x.numel(); ++i) v[i] = xv[i] - cv[i];
  Tensor out = Tensor::from_values(x.shape(), std::move(v), x.requires_grad());
  if (want_record(tape, out)) {
    Tensor xc = x, oc = out;
    tape->record(out, [xc, oc]() mutable {
      if (!xc.requires_grad()) return;
      double* gx = xc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      for (std::int64_t i = 0; i < xc.numel(); ++i) gx[i] += go[i];
    });
  }
  return out;
}

Tensor mul_const(Tape* tape, const Tensor& x, const Tensor& c) {
  require(x.shape() == c.shape(), "mul_const shape mismatch");
  const double* cv = c.data();
  std::vector<double> v(x.numel());
  const double* xv = x.data();
  for (std::int64_t i = 0; i < x.numel(); ++i) v[i] = xv[i] * cv[i];
  Tensor out = Tensor::from_values(x.shape(), std::move(v), x.requires_grad());
  if (want_record(tape, out)) {
    Tensor xc = x, oc = out;
    Tensor cc = c.detached();
    tape->record(out, [xc, oc, cc]() mutable {
      if (!xc.requires_grad()) return;
      double* gx = xc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      const double* cv = cc.data();
      for (std::int64_t i = 0; i < xc.numel(); ++i) gx[i] += go[i] * cv[i];
    });
  }
  return out;
}

Tensor bce_with_logits(Tape* tape, const Tensor& logits,
                       const std::vector<double>& labels) {
  require(static_cast<std::int64_t>(labels.size()) == logits.numel(),
          "bce label count mismatch");
  std::vector<double> v(logits.numel());
  const double* z = logits.data();
  for (std::int64_t i = 0; i < logits.numel(); ++i) {
    const double zi = z[i];
    v[i] = std::max(zi, 0.0) - zi * labels[i] + std::log1p(std::exp(-std::abs(zi)));
  }
  Tensor out = Tensor::from_values(logits.shape(), std::move(v),
                                   logits.requires_grad());
  if (want_record(tape, out)) {
    Tensor zc = logits, oc = out;
    std::vector<double> yc = labels;
    tape->record(out, [zc, oc, yc]() mutable {
      if (!zc.requires_grad()) return;
      double* gz = zc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      const double* z = zc.data();
      for (std::int64_t i = 0; i < zc.numel(); ++i) {
        const double s = z[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-z[i]))
                                     : std::exp(z[i]) / (1.0 + std::exp(z[i]));
        gz[i] += go[i] * (s - yc[i]);
      }
    });
  }
  return out;
}

Tensor termination_weights(Tape* tape, const Tensor& occupancy) {
  auto [rays, n] = mat_dims(occupancy);
  Tensor out = Tensor::zeros(occupancy.shape(), occupancy.requires_grad());
  const double* o = occupancy.data();
  double* w = out.data();
  std::vector<double> prefix(rays * n);  // T_i = prod_{j<i} (1 - o_j)
  for (std::int64_t r = 0; r < rays; ++r) {
    double t = 1.0;
    for (std::int64_t i = 0; i < n; ++i) {
      prefix[r * n + i] = t;
      w[r * n + i] = o[r * n + i] * t;
      t *= 1.0 - o[r * n + i];
    }
  }
  if (want_record(tape, out)) {
    Tensor occ = occupancy, oc = out;
    tape->record(out, [occ, oc, prefix, rays, n]() mutable {
      if (!occ.requires_grad()) return;
      double* go = occ.grad_mutable();
      const double* gw = oc.grad();
      if (!gw) return;
      const double* o = occ.data();
      // dw_i/do_k = T_i * [i == k] - o_i * prod_{j<i, j!=k} (1-o_j) for k < i,
      // accumulated division-free.
      for (std::int64_t r = 0; r < rays; ++r) {
        const double* orow = o + r * n;
        const double* grow = gw + r * n;
        const double* trow = prefix.data() + r * n;
        double* gout = go + r * n;
        for (std::int64_t k = 0; k < n; ++k) {
          double acc = grow[k] * trow[k];
          double part = trow[k];  // prod_{j<i, j!=k}(1-o_j), grown with i
          for (std::int64_t i = k + 1; i < n; ++i) {
            acc -= grow[i] * orow[i] * part;
            part *= 1.0 - orow[i];
          }
          gout[k] += acc;
        }
      }
    });
  }
  return out;
}

namespace {

// f(s) = sin(sqrt(s))/sqrt(s) and derivative, exact through s = 0.
void sinc_sqrt_eval(double s, double& f, double& df) {
  if (s < 1e-4) {
    f = 1.0 - s / 6.0 + s * s / 120.0 - s * s * s / 5040.0;
    df = -1.0 / 6.0 + s / 60.0 - s * s / 1680.0;
  } else {
    const double th = std::sqrt(s);
    f = std::sin(th) / th;
    df = (th * std::cos(th) - std::sin(th)) / (2.0 * s * th);
  }
}

// g(s) = (1 - cos(sqrt(s)))/s and derivative.
void versine_ratio_eval(double s, double& f, double& df) {
  if (s < 1e-4) {
    f = 0.5 - s / 24.0 + s * s / 720.0 - s * s * s / 40320.0;
    df = -1.0 / 24.0 + s / 360.0 - s * s / 13440.0;
  } else {
    const double th = std::sqrt(s);
    f = (1.0 - std::cos(th)) / s;
    df = (std::sin(th) * 0.5 * th - (1.0 - std::cos(th))) / (s * s);
  }
}

template <void (*Eval)(double, double&, double&)>
Tensor analytic_unary(Tape* tape, const Tensor& s) {
  std::vector<double> v(s.numel());
  const double* sv = s.data();
  for (std::int64_t i = 0; i < s.numel(); ++i) {
    double f, df;
    Eval(sv[i], f, df);
    v[i] = f;
  }
  Tensor out = Tensor::from_values(s.shape(), std::move(v), s.requires_grad());
  if (want_record(tape, out)) {
    Tensor sc = s, oc = out;
    tape->record(out, [sc, oc]() mutable {
      if (!sc.requires_grad()) return;
      double* gs = sc.grad_mutable();
      const double* go = oc.grad();
      if (!go) return;
      const double* sv = sc.data();
      for (std::int64_t i = 0; i < sc.numel(); ++i) {
        double f, df;
        Eval(sv[i], f, df);
        gs[i] += go[i] * df;
      }
    });
  }
  return out;
}

}  // namespace

Tensor sinc_sqrt(Tape* tape, const Tensor& s) {
  return analytic_unary<sinc_sqrt_eval>(tape, s);
}

Tensor versine_ratio(Tape* tape, const Tensor& s) {
  return analytic_unary<versine_ratio_eval>(tape, s);
}

}  // namespace gridslam::diffmath
