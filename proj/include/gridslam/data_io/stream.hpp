#pragma once

#include <vector>

#include "gridslam/data_io/image.hpp"
#include "gridslam/diffmath/pose.hpp"

namespace gridslam::data_io {

struct Frame {
  double timestamp = 0.0;
  Image color;
  DepthImage depth;
};

// Ordered RGB-D frames with shared intrinsics. Raw integer depth values in
// files are divided by depth_scale on load (TUM: 5000 units per meter).
struct FrameStream {
  std::vector<Frame> frames;
  Intrinsics intrinsics;
  double depth_scale = 5000.0;
};

struct TimedPose {
  double timestamp = 0.0;
  diffmath::CameraPose pose;
};

using Trajectory = std::vector<TimedPose>;

}  // namespace gridslam::data_io
