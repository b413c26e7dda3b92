#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridslam/data_io/stream.hpp"
#include "gridslam/diffmath/pose.hpp"
#include "gridslam/geometry.hpp"

namespace gridslam::synthworld {

using data_io::FrameStream;
using data_io::Trajectory;
using diffmath::CameraPose;
using diffmath::Rng;

struct Primitive {
  enum class Kind { box, sphere, plane };
  Kind kind = Kind::box;
  Vec3 center = Vec3::Zero();   // box/sphere center, plane anchor
  Vec3 half = Vec3::Zero();     // box half-extents
  double radius = 0.0;          // sphere
  Vec3 normal = Vec3::UnitZ();  // plane (occupied side is below the normal)
  Vec3 albedo = Vec3(0.7, 0.7, 0.7);
  bool dynamic = false;

  double sdf(const Vec3& p) const;
};

// Union of signed-distance primitives (min); occupancy(p) = sdf(p) <= 0.
struct AnalyticScene {
  std::vector<Primitive> prims;
  Aabb bounds;
  Vec3 light_dir = Vec3(-0.35, 0.25, -0.9).normalized();

  double sdf(const Vec3& p, const Vec3& dynamic_offset = Vec3::Zero(),
             int* hit_prim = nullptr) const;
  bool occupancy(const Vec3& p,
                 const Vec3& dynamic_offset = Vec3::Zero()) const {
    return sdf(p, dynamic_offset) <= 0.0;
  }
  Vec3 normal_at(const Vec3& p, const Vec3& dynamic_offset) const;
};

double scene_sdf(const AnalyticScene& s, const Vec3& p);
bool scene_occupancy(const AnalyticScene& s, const Vec3& p);

// Axis-aligned room shell (floor, ceiling, four walls) with colored faces.
AnalyticScene make_room(const Aabb& interior, double wall_thickness,
                        Rng* rng = nullptr);
// Room shell plus 3..6 random box/sphere furniture pieces.
AnalyticScene random_room(Rng& rng, const Aabb& interior);

struct TrajectorySpec {
  enum class Kind { orbit, pan, dolly };
  Kind kind = Kind::orbit;
  int frames = 20;
  Vec3 target = Vec3::Zero();       // look-at point
  Vec3 start_eye = Vec3::Zero();    // pan/dolly start
  double radius = 1.2;              // orbit
  double height = 1.5;              // orbit eye height
  double arc_start = 0.0;           // radians
  double arc_end = 0.7;
  double pan_angle = 0.0;           // pan: total yaw sweep
  Vec3 dolly_delta = Vec3::Zero();  // dolly: total translation
  double fps = 10.0;
};

// Look-at pose with +z forward, +y down (world +z is up).
CameraPose look_at(const Vec3& eye, const Vec3& target);

// Per-frame poses; throws when a camera position is not in free space
// (SDF <= 0.1 m).
std::vector<CameraPose> scripted_trajectory(const AnalyticScene& scene,
                                            const TrajectorySpec& spec);

struct RenderNoise {
  double depth_sigma = 0.0;     // meters
  double dropout = 0.0;         // fraction of pixels with invalid depth
};

// Sphere-traced ground-truth RGB-D render. Depth is z-depth in meters;
// dynamic_mask (when given) marks pixels whose first hit is a dynamic
// primitive.
void render_gt_frame(const AnalyticScene& scene, const CameraPose& pose,
                     const Intrinsics& intr, const RenderNoise& noise,
                     Rng& rng, data_io::Image& color,
                     data_io::DepthImage& depth,
                     std::vector<std::uint8_t>* dynamic_mask = nullptr,
                     const Vec3& dynamic_offset = Vec3::Zero());

// Linear per-frame offset track for the dynamic primitives.
struct DynamicTrack {
  Vec3 start = Vec3::Zero();
  Vec3 step = Vec3::Zero();
  Vec3 offset(int frame) const { return start + double(frame) * step; }
};

struct Sequence {
  FrameStream stream;
  Trajectory gt;
  std::vector<std::vector<std::uint8_t>> dynamic_masks;  // empty when static
};

Sequence make_sequence(const AnalyticScene& scene,
                       const std::vector<CameraPose>& poses,
                       const Intrinsics& intr, const RenderNoise& noise,
                       Rng& rng,
                       const std::optional<DynamicTrack>& dynamics = {},
                       double fps = 10.0);

}  // namespace gridslam::synthworld
