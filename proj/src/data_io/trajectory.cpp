#include "gridslam/data_io/trajectory.hpp"

#include <fstream>
#include <sstream>

#include "gridslam/data_io/mesh.hpp"

namespace gridslam::data_io {

Eigen::Vector4d rotation_to_quat_xyzw(const Eigen::Matrix3d& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0) q.coeffs() *= -1.0;
  return Eigen::Vector4d(q.x(), q.y(), q.z(), q.w());
}

Eigen::Matrix3d quat_xyzw_to_rotation(const Eigen::Vector4d& v) {
  Eigen::Quaterniond q(v[3], v[0], v[1], v[2]);
  q.normalize();
  return q.toRotationMatrix();
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << "# timestamp tx ty tz qx qy qz qw\n";
  char line[256];
  for (const auto& tp : traj) {
    const Eigen::Vector4d q = rotation_to_quat_xyzw(tp.pose.R);
    snprintf(line, sizeof(line),
             "%.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f", tp.timestamp,
             tp.pose.t.x(), tp.pose.t.y(), tp.pose.t.z(), q[0], q[1], q[2],
             q[3]);
    out << line << "\n";
  }
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trajectory '" + path + "'");
  Trajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    TimedPose tp;
    Eigen::Vector4d q;
    if (ss >> tp.timestamp >> tp.pose.t.x() >> tp.pose.t.y() >>
        tp.pose.t.z() >> q[0] >> q[1] >> q[2] >> q[3]) {
      tp.pose.R = quat_xyzw_to_rotation(q);
      traj.push_back(tp);
    }
  }
  return traj;
}

}  // namespace gridslam::data_io
