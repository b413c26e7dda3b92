#pragma once

#include "gridslam/data_io/mesh.hpp"
#include "gridslam/data_io/mesh_query.hpp"
#include "gridslam/data_io/stream.hpp"
#include "gridslam/scene/frustum.hpp"

namespace gridslam::data_io {

struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalReport {
  double ate_rmse_cm = -1.0;
  double depth_l1_cm = -1.0;
  double accuracy_cm = -1.0;
  double completion_cm = -1.0;
  double completion_ratio_pct = -1.0;
};

// Associates by nearest timestamp (within max_dt), removes the best rigid
// transform (no scale) between the matched translations, and returns the
// RMSE of the residuals in centimeters. Throws MetricError for < 2 matches.
double ate_rmse(const Trajectory& estimated, const Trajectory& reference,
                double max_dt = 0.02);

struct MetricConfig {
  int surface_samples = 10000;   // per mesh, area-weighted
  int depth_views = 50;          // virtual views for depth L1
  double ratio_threshold = 0.05; // completion-ratio cutoff, meters
  double view_jitter = 0.05;     // pose jitter, meters / radians
  double free_space_clearance = 0.1;
  unsigned seed = 12345;
};

// Keeps reference triangles with at least one vertex inside any frustum.
TriangleMesh cull_mesh(const TriangleMesh& reference,
                       const std::vector<scene::Frustum>& frusta);

// z-depth raycast render of a mesh (0 where the ray misses).
DepthImage render_mesh_depth(const MeshAccel& accel,
                             const Intrinsics& intr,
                             const diffmath::CameraPose& pose,
                             double t_max = 50.0);

// Accuracy / completion / completion-ratio / depth-L1 against a reference
// mesh. The reference is culled to the union of the given frusta first (pass
// an empty list to skip culling). Virtual depth views are jittered copies of
// view_poses, rejected when inside geometry.
EvalReport reconstruction_metrics(const TriangleMesh& reconstruction,
                                  const TriangleMesh& reference,
                                  const std::vector<scene::Frustum>& frusta,
                                  const Intrinsics& intr,
                                  const Trajectory& view_poses,
                                  const MetricConfig& cfg = {});

}  // namespace gridslam::data_io
