#include "gridslam/diffmath/pose.hpp"

namespace gridslam::diffmath {

Eigen::Matrix4d CameraPose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<3, 3>(0, 0) = R;
  m.block<3, 1>(0, 3) = t;
  return m;
}

CameraPose CameraPose::from_matrix(const Eigen::Matrix4d& m) {
  CameraPose p;
  p.R = m.block<3, 3>(0, 0);
  p.t = m.block<3, 1>(0, 3);
  return p;
}

double CameraPose::rotation_drift() const {
  return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Mat3 so3_exp(const Vec3& omega) {
  const double s = omega.squaredNorm();
  double a, b;
  if (s < 1e-4) {
    a = 1.0 - s / 6.0 + s * s / 120.0;
    b = 0.5 - s / 24.0 + s * s / 720.0;
  } else {
    const double th = std::sqrt(s);
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / s;
  }
  Mat3 K;
  K << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(),
      omega.x(), 0;
  return Mat3::Identity() + a * K + b * K * K;
}

Vec3 so3_log(const Mat3& R) {
  Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

CameraPose se3_retract(const CameraPose& pose, const Vec6& delta) {
  const Vec3 omega = delta.head<3>();
  const Vec3 u = delta.tail<3>();
  if (omega.isZero(0.0) && u.isZero(0.0)) return pose;
  const Mat3 E = so3_exp(omega);
  CameraPose out{E * pose.R, E * pose.t + u};
  if (out.rotation_drift() > 1e-12) {
    Eigen::JacobiSVD<Mat3> svd(out.R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 fixed = svd.matrixU() * svd.matrixV().transpose();
    if (fixed.determinant() < 0.0) {
      Mat3 flip = Mat3::Identity();
      flip(2, 2) = -1.0;
      fixed = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    out.R = fixed;
  }
  return out;
}

Vec6 se3_log_delta(const CameraPose& base, const CameraPose& target) {
  const Vec3 omega = so3_log(target.R * base.R.transpose());
  const Vec3 u = target.t - so3_exp(omega) * base.t;
  Vec6 d;
  d << omega, u;
  return d;
}

PoseGraph pose_apply_delta(Tape* tape, const CameraPose& base,
                           const Tensor& delta6) {
  if (delta6.numel() != 6) throw ShapeError("pose delta must have 6 entries");
  Tensor d = reshape(tape, delta6, {1, 6});
  Tensor omega = slice_cols(tape, d, 0, 3);  // [1,3]
  Tensor u = slice_cols(tape, d, 3, 6);      // [1,3]

  // Cross-product matrix as a constant linear map of omega: vec(K) = H*w.
  Tensor hat = Tensor::zeros({3, 9});
  {
    double* h = hat.data();
    auto set = [&](int row, int col, double v) { h[row * 9 + col] = v; };
    set(2, 1, -1.0);  // K(0,1) = -wz
    set(1, 2, 1.0);   // K(0,2) = +wy
    set(2, 3, 1.0);   // K(1,0) = +wz
    set(0, 5, -1.0);  // K(1,2) = -wx
    set(1, 6, -1.0);  // K(2,0) = -wy
    set(0, 7, 1.0);   // K(2,1) = +wx
  }
  Tensor K = reshape(tape, matmul(tape, omega, hat), {3, 3});
  Tensor K2 = matmul(tape, K, K);

  Tensor s = matmul(tape, omega, omega, false, true);  // [1,1] squared angle
  Tensor a = sinc_sqrt(tape, s);
  Tensor b = versine_ratio(tape, s);

  // exp(w) = I + a K + b K^2, with a,b broadcast over the 3x3 entries.
  Tensor a9 = repeat_rows(tape, reshape(tape, a, {1, 1}), 9);  // [9,1]
  Tensor b9 = repeat_rows(tape, reshape(tape, b, {1, 1}), 9);
  Tensor Kf = reshape(tape, K, {9, 1});
  Tensor K2f = reshape(tape, K2, {9, 1});
  Tensor expw_f = add(tape, mul(tape, a9, Kf), mul(tape, b9, K2f));
  Tensor eye = Tensor::from_values({9, 1}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  Tensor E = reshape(tape, add(tape, expw_f, eye), {3, 3});

  Tensor baseR = Tensor::from_values(
      {3, 3}, {base.R(0, 0), base.R(0, 1), base.R(0, 2), base.R(1, 0),
               base.R(1, 1), base.R(1, 2), base.R(2, 0), base.R(2, 1),
               base.R(2, 2)});
  Tensor baset = Tensor::from_values({3, 1}, {base.t(0), base.t(1), base.t(2)});

  PoseGraph out;
  out.rotation = matmul(tape, E, baseR);
  Tensor Et = matmul(tape, E, baset);                    // [3,1]
  out.translation = add(tape, reshape(tape, Et, {1, 3}), u);
  return out;
}

}  // namespace gridslam::diffmath
