#pragma once

#include <string>

#include "gridslam/data_io/stream.hpp"

namespace gridslam::data_io {

// One line per pose: "timestamp tx ty tz qx qy qz qw", six decimals, unit
// quaternion (TUM evaluation format).
void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

Eigen::Vector4d rotation_to_quat_xyzw(const Eigen::Matrix3d& R);
Eigen::Matrix3d quat_xyzw_to_rotation(const Eigen::Vector4d& q);

}  // namespace gridslam::data_io
