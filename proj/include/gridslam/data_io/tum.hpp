#pragma once

#include <optional>
#include <string>

#include "gridslam/data_io/stream.hpp"

namespace gridslam::data_io {

struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// TUM RGB-D directory: rgb.txt / depth.txt index files ("timestamp path"
// lines, '#' comments), images under the listed relative paths, optional
// groundtruth.txt ("timestamp tx ty tz qx qy qz qw"). Color and depth are
// associated by nearest timestamp within max_dt; unpaired frames are dropped.
// Raw 16-bit depth divides by depth_scale (5000 units per meter).
FrameStream load_tum_sequence(const std::string& dir,
                              const Intrinsics& intrinsics,
                              double max_dt = 0.02,
                              double depth_scale = 5000.0);

std::optional<Trajectory> load_tum_groundtruth(const std::string& dir);

// Writes a frame stream in the same layout (rgb/, depth/, index files,
// groundtruth.txt, intrinsics.txt) so load_tum_sequence round-trips it.
void write_tum_dataset(const FrameStream& stream, const Trajectory& gt,
                       const std::string& dir);

// Reads intrinsics.txt when present (fx fy cx cy width height).
std::optional<Intrinsics> load_tum_intrinsics(const std::string& dir);

}  // namespace gridslam::data_io
