#pragma once

#include <vector>

#include "gridslam/geometry.hpp"

namespace gridslam::data_io {

// Row-major RGB image, channels in [0,1].
struct Image {
  int width = 0, height = 0;
  std::vector<double> rgb;  // height*width*3

  static Image create(int width, int height) {
    return {width, height, std::vector<double>(std::size_t(width) * height * 3, 0.0)};
  }
  double* at(int u, int v) { return rgb.data() + (std::size_t(v) * width + u) * 3; }
  const double* at(int u, int v) const {
    return rgb.data() + (std::size_t(v) * width + u) * 3;
  }
};

// Depth in meters, 0 = invalid.
struct DepthImage {
  int width = 0, height = 0;
  std::vector<double> depth;  // height*width

  static DepthImage create(int width, int height) {
    return {width, height, std::vector<double>(std::size_t(width) * height, 0.0)};
  }
  double& at(int u, int v) { return depth[std::size_t(v) * width + u]; }
  double at(int u, int v) const { return depth[std::size_t(v) * width + u]; }
};

}  // namespace gridslam::data_io
