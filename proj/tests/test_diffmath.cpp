#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "gridslam/diffmath/adam.hpp"
#include "gridslam/diffmath/encoder.hpp"
#include "gridslam/diffmath/mlp.hpp"
#include "gridslam/diffmath/ops.hpp"
#include "gridslam/diffmath/pose.hpp"
#include "gridslam/diffmath/serialize.hpp"
#include "support/testutil.hpp"

using namespace gridslam::diffmath;
using gridslam::testsupport::max_grad_rel_err;
using gridslam::testsupport::rel_err;

TEST_CASE("backward of sum gives all-ones; of squared norm gives 2x") {
  Rng rng(7);
  Tensor x = Tensor::randn({4, 3}, rng, 1.0, true);
  {
    Tape tape;
    Tensor loss = sum(&tape, x);
    tape.backward(loss);
    for (std::int64_t i = 0; i < x.numel(); ++i) CHECK(x.grad()[i] == 1.0);
  }
  x.zero_grad();
  {
    Tape tape;
    Tensor loss = sum(&tape, square(&tape, x));
    tape.backward(loss);
    for (std::int64_t i = 0; i < x.numel(); ++i)
      CHECK(x.grad()[i] == 2.0 * x.data()[i]);
  }
}

TEST_CASE("backward rejects non-scalar loss") {
  Tensor x = Tensor::zeros({2, 2}, true);
  Tape tape;
  Tensor y = scale(&tape, x, 2.0);
  CHECK_THROWS_AS(tape.backward(y), ContractError);
}

TEST_CASE("backward is bit-deterministic") {
  Rng rng(11);
  Tensor w = Tensor::randn({6, 4}, rng, 0.5, true);
  Tensor x = Tensor::randn({5, 6}, rng, 0.5, true);
  auto run = [&]() {
    w.zero_grad();
    x.zero_grad();
    Tape tape;
    Tensor y = sigmoid(&tape, matmul(&tape, x, w));
    tape.backward(sum(&tape, square(&tape, y)));
    std::vector<double> g = w.grad_vector();
    auto gx = x.grad_vector();
    g.insert(g.end(), gx.begin(), gx.end());
    return g;
  };
  auto g1 = run();
  auto g2 = run();
  CHECK(g1 == g2);
}

TEST_CASE("gradient accumulates across backward calls") {
  Tensor x = Tensor::from_values({2}, {1.0, 2.0}, true);
  Tape tape;
  Tensor loss = sum(&tape, x);
  tape.backward(loss);
  tape.backward(loss);
  CHECK(x.grad()[0] == 2.0);
  CHECK(x.grad()[1] == 2.0);
}

TEST_CASE("elementwise and reduction primitives match finite differences") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor x = Tensor::randn({3, 4}, rng, 0.8, true);
    // keep relu inputs away from the kink
    for (std::int64_t i = 0; i < x.numel(); ++i)
      if (std::abs(x.data()[i]) < 0.05)
        x.data()[i] += x.data()[i] >= 0 ? 0.1 : -0.1;
    auto build = [&](Tape* tape) {
      Tensor h = relu(tape, x);
      h = sigmoid(tape, h);
      h = sin_op(tape, h);
      h = add(tape, h, cos_op(tape, x));
      h = mul(tape, h, x);
      h = div(tape, h, add_scalar(tape, square(tape, x), 1.0));
      return mean(tape, h);
    };
    Tape tape;
    Tensor loss = build(&tape);
    tape.backward(loss);
    std::vector<double> analytic = x.grad_vector();
    const double worst = max_grad_rel_err(
        [&]() { return build(nullptr).value(); }, x, analytic, 1e-6);
    CHECK(worst <= 1e-5);
    x.zero_grad();
  }
}

TEST_CASE("matmul transpose variants match finite differences") {
  Rng rng(29);
  for (bool ta : {false, true})
    for (bool tb : {false, true}) {
      Tensor a = ta ? Tensor::randn({4, 3}, rng, 0.7, true)
                    : Tensor::randn({3, 4}, rng, 0.7, true);
      Tensor b = tb ? Tensor::randn({5, 4}, rng, 0.7, true)
                    : Tensor::randn({4, 5}, rng, 0.7, true);
      auto build = [&](Tape* tape) {
        return sum(tape, square(tape, matmul(tape, a, b, ta, tb)));
      };
      Tape tape;
      tape.backward(build(&tape));
      CHECK(max_grad_rel_err([&]() { return build(nullptr).value(); }, a,
                             a.grad_vector()) <= 1e-6);
      CHECK(max_grad_rel_err([&]() { return build(nullptr).value(); }, b,
                             b.grad_vector()) <= 1e-6);
    }
}

TEST_CASE("termination weights: closed forms and telescoping identity") {
  // opaque first sample
  Tensor o1 = Tensor::from_values({1, 4}, {1.0, 0.3, 0.9, 0.2});
  Tensor w1 = termination_weights(nullptr, o1);
  CHECK(w1.data()[0] == 1.0);
  CHECK(w1.data()[1] == 0.0);
  CHECK(w1.data()[2] == 0.0);
  CHECK(w1.data()[3] == 0.0);

  Tensor o2 = Tensor::from_values({1, 2}, {0.5, 0.5});
  Tensor w2 = termination_weights(nullptr, o2);
  CHECK(w2.data()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w2.data()[1] == doctest::Approx(0.25).epsilon(1e-15));

  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor o = Tensor::from_values(
        {1, 16}, gridslam::testsupport::random_vector(rng, 16, 0.0, 1.0));
    Tensor w = termination_weights(nullptr, o);
    double wsum = 0.0, prod = 1.0;
    for (int i = 0; i < 16; ++i) {
      wsum += w.data()[i];
      prod *= 1.0 - o.data()[i];
      CHECK(w.data()[i] >= 0.0);
      CHECK(w.data()[i] <= 1.0);
    }
    CHECK(std::abs(wsum - (1.0 - prod)) <= 1e-12);
  }
}

TEST_CASE("termination weights gradient matches finite differences") {
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor o = Tensor::from_values(
        {2, 6}, gridslam::testsupport::random_vector(rng, 12, 0.05, 0.95));
    o.set_requires_grad(true);
    std::vector<double> coef =
        gridslam::testsupport::random_vector(rng, 12, -1.0, 1.0);
    auto build = [&](Tape* tape) {
      return weighted_sum(tape, termination_weights(tape, o), coef);
    };
    Tape tape;
    tape.backward(build(&tape));
    std::vector<double> dir =
        gridslam::testsupport::random_vector(rng, 12, -1.0, 1.0);
    CHECK(gridslam::testsupport::jvp_rel_err(
              [&]() { return build(nullptr).value(); }, o, o.grad_vector(),
              dir) <= 1e-5);
    o.zero_grad();
  }
}

TEST_CASE("mlp: zero parameters produce zero output") {
  Rng rng(41);
  MLPParams p = MLPParams::create_default(7, 2, rng);
  for (auto& w : p.weights)
    std::fill(w.values().begin(), w.values().end(), 0.0);
  Tensor x = Tensor::randn({5, 7}, rng);
  Tensor y = mlp_forward(nullptr, p, x);
  for (std::int64_t i = 0; i < y.numel(); ++i) CHECK(y.data()[i] == 0.0);
}

TEST_CASE("mlp with positive weights and zero bias equals the matrix chain") {
  Rng rng(43);
  std::vector<int> widths{3, 4, 4, 4, 4, 2};
  MLPParams p = MLPParams::create(widths, rng);
  for (auto& w : p.weights)
    for (auto& v : w.values()) v = std::abs(v) + 0.01;
  Tensor x = Tensor::from_values({1, 3}, {0.4, 1.2, 0.9});
  Tensor y = mlp_forward(nullptr, p, x);

  // independent naive chain multiply (ReLU transparent: everything positive)
  std::vector<double> cur(x.values());
  for (const auto& w : p.weights) {
    const int in = w.dim(0), out = w.dim(1);
    std::vector<double> next(out, 0.0);
    for (int j = 0; j < out; ++j)
      for (int i = 0; i < in; ++i) next[j] += cur[i] * w.data()[i * out + j];
    cur = next;
  }
  REQUIRE(cur.size() == static_cast<std::size_t>(y.numel()));
  for (std::size_t i = 0; i < cur.size(); ++i)
    CHECK(rel_err(cur[i], y.data()[i]) <= 1e-12);
}

TEST_CASE("mlp input and parameter gradients match finite differences") {
  Rng rng(47);
  MLPParams p = MLPParams::create({5, 8, 8, 8, 8, 3}, rng);
  p.set_requires_grad(true);
  Tensor x = Tensor::randn({4, 5}, rng, 0.6, true);
  std::vector<double> coef =
      gridslam::testsupport::random_vector(rng, 12, -1.0, 1.0);
  auto build = [&](Tape* tape) {
    return weighted_sum(tape, sigmoid(tape, mlp_forward(tape, p, x)), coef);
  };
  Tape tape;
  tape.backward(build(&tape));
  CHECK(max_grad_rel_err([&]() { return build(nullptr).value(); }, x,
                         x.grad_vector(), 1e-6) <= 1e-6);
  for (auto& w : p.weights)
    CHECK(max_grad_rel_err([&]() { return build(nullptr).value(); }, w,
                           w.grad_vector(), 1e-5) <= 1e-5);
}

TEST_CASE("mlp rejects mismatched input width") {
  Rng rng(53);
  MLPParams p = MLPParams::create_default(7, 1, rng);
  Tensor x = Tensor::zeros({2, 6});
  CHECK_THROWS_AS(mlp_forward(nullptr, p, x), ShapeError);
}

TEST_CASE("positional encoding: origin and zero frequencies") {
  Rng rng(59);
  GaussianEncoder enc = GaussianEncoder::create(8, 3.0, rng);
  Tensor p0 = Tensor::zeros({1, 3});
  Tensor e0 = positional_encode(nullptr, enc, p0);
  REQUIRE(e0.numel() == enc.output_dim());
  for (int i = 0; i < 8; ++i) CHECK(e0.data()[i] == 0.0);        // sines
  for (int i = 8; i < 16; ++i) CHECK(e0.data()[i] == 1.0);       // cosines

  GaussianEncoder zero = GaussianEncoder::create(8, 3.0, rng);
  std::fill(zero.freq.values().begin(), zero.freq.values().end(), 0.0);
  Tensor pa = Tensor::randn({1, 3}, rng);
  Tensor pb = Tensor::randn({1, 3}, rng);
  Tensor ea = positional_encode(nullptr, zero, pa);
  Tensor eb = positional_encode(nullptr, zero, pb);
  for (int i = 0; i < 16; ++i) CHECK(ea.data()[i] == eb.data()[i]);
}

TEST_CASE("positional encoding gradients match finite differences") {
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    GaussianEncoder enc = GaussianEncoder::create(6, 2.0, rng);
    enc.freq.set_requires_grad(true);
    Tensor pts = Tensor::randn({3, 3}, rng, 0.5, true);
    std::vector<double> coef =
        gridslam::testsupport::random_vector(rng, 3 * enc.output_dim(), -1, 1);
    auto build = [&](Tape* tape) {
      return weighted_sum(tape, positional_encode(tape, enc, pts), coef);
    };
    Tape tape;
    tape.backward(build(&tape));
    CHECK(max_grad_rel_err([&]() { return build(nullptr).value(); }, pts,
                           pts.grad_vector(), 1e-6) <= 1e-6);
    CHECK(max_grad_rel_err([&]() { return build(nullptr).value(); }, enc.freq,
                           enc.freq.grad_vector(), 1e-6) <= 1e-6);
    pts.zero_grad();
    enc.freq.zero_grad();
  }
}

TEST_CASE("se3_retract: zero delta is a bit-exact no-op") {
  Rng rng(67);
  CameraPose pose;
  pose.R = so3_exp(Vec3(0.3, -0.2, 0.8));
  pose.t = Vec3(1.0, -2.0, 0.5);
  CameraPose out = se3_retract(pose, Vec6::Zero());
  CHECK(out.R == pose.R);
  CHECK(out.t == pose.t);
}

TEST_CASE("se3_retract: quarter turn about z maps x to y") {
  Vec6 d;
  d << 0, 0, M_PI / 2, 0, 0, 0;
  CameraPose out = se3_retract(CameraPose{}, d);
  Vec3 p = out.apply(Vec3(1, 0, 0));
  CHECK(std::abs(p.x() - 0.0) <= 1e-12);
  CHECK(std::abs(p.y() - 1.0) <= 1e-12);
  CHECK(std::abs(p.z() - 0.0) <= 1e-12);
}

TEST_CASE("se3_retract then matrix-log recovers delta") {
  Rng rng(71);
  std::uniform_real_distribution<double> dist(-0.28, 0.28);
  for (int trial = 0; trial < 50; ++trial) {
    CameraPose base;
    base.R = so3_exp(Vec3(dist(rng), dist(rng), dist(rng)));
    base.t = Vec3(dist(rng), dist(rng), dist(rng)) * 3.0;
    Vec6 delta;
    for (int i = 0; i < 6; ++i) delta[i] = dist(rng);
    CameraPose moved = se3_retract(base, delta);

    // independent recovery via Eigen's dense matrix logarithm
    Eigen::Matrix3d rel = moved.R * base.R.transpose();
    Eigen::Matrix3d lg = rel.log();
    Vec3 omega(lg(2, 1), lg(0, 2), lg(1, 0));
    Vec3 u = moved.t - lg.exp() * base.t;
    CHECK((omega - delta.head<3>()).norm() <= 1e-9);
    CHECK((u - delta.tail<3>()).norm() <= 1e-9);
  }
}

TEST_CASE("rotation stays orthonormal over 10000 chained retractions") {
  Rng rng(73);
  std::uniform_real_distribution<double> dist(-0.02, 0.02);
  CameraPose pose;
  for (int i = 0; i < 10000; ++i) {
    Vec6 d;
    for (int k = 0; k < 6; ++k) d[k] = dist(rng);
    pose = se3_retract(pose, d);
  }
  CHECK(pose.rotation_drift() <= 1e-9);
  CHECK(std::abs(pose.R.determinant() - 1.0) <= 1e-9);
}

TEST_CASE("pose_apply_delta matches retraction and finite differences") {
  Rng rng(79);
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  for (int trial = 0; trial < 30; ++trial) {
    CameraPose base;
    base.R = so3_exp(Vec3(dist(rng), dist(rng), dist(rng)));
    base.t = Vec3(dist(rng), dist(rng), dist(rng));
    Vec6 dv;
    for (int i = 0; i < 6; ++i) dv[i] = dist(rng);

    Tensor delta = Tensor::from_values(
        {6}, {dv[0], dv[1], dv[2], dv[3], dv[4], dv[5]}, true);
    PoseGraph pg = pose_apply_delta(nullptr, base, delta);
    CameraPose expect = se3_retract(base, dv);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c)
        CHECK(std::abs(pg.rotation.data()[r * 3 + c] - expect.R(r, c)) <=
              1e-12);
      CHECK(std::abs(pg.translation.data()[r] - expect.t(r)) <= 1e-12);
    }

    std::vector<double> coef =
        gridslam::testsupport::random_vector(rng, 12, -1.0, 1.0);
    auto build = [&](Tape* tape) {
      PoseGraph g = pose_apply_delta(tape, base, delta);
      Tensor flat = concat_cols(
          tape, {reshape(tape, g.rotation, {1, 9}), g.translation});
      return weighted_sum(tape, flat, coef);
    };
    Tape tape;
    tape.backward(build(&tape));
    CHECK(max_grad_rel_err([&]() { return build(nullptr).value(); }, delta,
                           delta.grad_vector(), 1e-6) <= 1e-5);
  }
}

TEST_CASE("pose_apply_delta is differentiable at exactly zero delta") {
  CameraPose base;
  base.R = so3_exp(Vec3(0.2, 0.1, -0.3));
  base.t = Vec3(0.5, 1.0, -0.2);
  Tensor delta = Tensor::zeros({6}, true);
  std::vector<double> coef(12, 1.0);
  auto build = [&](Tape* tape) {
    PoseGraph g = pose_apply_delta(tape, base, delta);
    Tensor flat =
        concat_cols(tape, {reshape(tape, g.rotation, {1, 9}), g.translation});
    return weighted_sum(tape, flat, coef);
  };
  Tape tape;
  tape.backward(build(&tape));
  CHECK(max_grad_rel_err([&]() { return build(nullptr).value(); }, delta,
                         delta.grad_vector(), 1e-6) <= 1e-5);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Tensor p = Tensor::from_values({3}, {1.0, -2.0, 0.5});
  std::vector<double> before(p.values());
  AdamState st;
  std::vector<double> g(3, 0.0);
  adam_step(p, g.data(), st, AdamConfig{});
  CHECK(p.values() == before);
}

TEST_CASE("adam single and double step match the hand-rolled recurrence") {
  AdamConfig cfg;
  cfg.lr = 0.1;
  Tensor p = Tensor::from_values({2}, {1.0, -1.0});
  std::vector<double> g{0.3, -0.7};
  AdamState st;
  adam_step(p, g.data(), st, cfg);
  for (int i = 0; i < 2; ++i) {
    const double m = (1 - cfg.beta1) * g[i];
    const double v = (1 - cfg.beta2) * g[i] * g[i];
    const double mh = m / (1 - cfg.beta1);
    const double vh = v / (1 - cfg.beta2);
    const double expect =
        (i == 0 ? 1.0 : -1.0) - cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    CHECK(p.data()[i] == expect);
  }

  adam_step(p, g.data(), st, cfg);
  for (int i = 0; i < 2; ++i) {
    double m = 0, v = 0, x = (i == 0 ? 1.0 : -1.0);
    for (int t = 1; t <= 2; ++t) {
      m = cfg.beta1 * m + (1 - cfg.beta1) * g[i];
      v = cfg.beta2 * v + (1 - cfg.beta2) * g[i] * g[i];
      const double mh = m / (1 - std::pow(cfg.beta1, t));
      const double vh = v / (1 - std::pow(cfg.beta2, t));
      x -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    }
    CHECK(p.data()[i] == x);
  }
}

TEST_CASE("masked adam leaves unmasked entries and moments bit-identical") {
  Rng rng(83);
  Tensor p = Tensor::randn({10}, rng);
  std::vector<double> before(p.values());
  std::vector<double> g = gridslam::testsupport::random_vector(rng, 10, -1, 1);
  AdamState st;
  adam_step_masked(p, g.data(), st, AdamConfig{}, {1, 4, 7});
  for (int i = 0; i < 10; ++i) {
    const bool masked = (i == 1 || i == 4 || i == 7);
    if (masked)
      CHECK(p.data()[i] != before[i]);
    else
      CHECK(p.data()[i] == before[i]);
  }
}

TEST_CASE("parameter container round-trips bit-exactly") {
  Rng rng(89);
  Tensor a = Tensor::randn({4, 5}, rng);
  Tensor b = Tensor::randn({7}, rng, 3.0);
  ParamWriter w;
  w.add("alpha", a);
  w.add("beta", b);
  w.meta()["note"] = "round-trip";
  const std::string path = "container_roundtrip.bin";
  w.write(path);

  ParamReader r = ParamReader::open(path);
  CHECK(r.has("alpha"));
  CHECK(r.meta().at("note") == "round-trip");
  Tensor a2 = r.get("alpha");
  Tensor b2 = r.get("beta");
  CHECK(a2.shape() == a.shape());
  CHECK(a2.values() == a.values());
  CHECK(b2.values() == b.values());
  CHECK_THROWS_AS(r.get("gamma"), ConfigError);
  CHECK_THROWS_AS(ParamReader::open("does_not_exist.bin"), ConfigError);
}
