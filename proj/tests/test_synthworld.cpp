#include <doctest.h>

#include "gridslam/synthworld/world.hpp"
#include "support/testutil.hpp"

using namespace gridslam;
using namespace gridslam::synthworld;
using diffmath::Rng;

namespace {
Intrinsics desk_intr() { return Intrinsics{40, 40, 32, 24, 64, 48}; }
Aabb room_box() { return {Vec3(0, 0, 0), Vec3(4, 4, 3)}; }
}  // namespace

TEST_CASE("sphere SDF and occupancy at canonical points") {
  AnalyticScene s;
  s.bounds = {Vec3(-2, -2, -2), Vec3(2, 2, 2)};
  Primitive p;
  p.kind = Primitive::Kind::sphere;
  p.center = Vec3::Zero();
  p.radius = 1.0;
  s.prims.push_back(p);
  CHECK(scene_sdf(s, Vec3(0, 0, 0)) == -1.0);
  CHECK(scene_occupancy(s, Vec3(0, 0, 0)));
  CHECK(scene_sdf(s, Vec3(2, 0, 0)) == 1.0);
  CHECK_FALSE(scene_occupancy(s, Vec3(2, 0, 0)));
}

TEST_CASE("union SDF equals the min of the primitive SDFs") {
  Rng rng(3);
  AnalyticScene s;
  s.bounds = {Vec3(-3, -3, -3), Vec3(3, 3, 3)};
  Primitive a, b;
  a.kind = Primitive::Kind::box;
  a.center = Vec3(-0.5, 0, 0);
  a.half = Vec3(0.5, 0.4, 0.3);
  b.kind = Primitive::Kind::box;
  b.center = Vec3(0.8, 0.2, -0.1);
  b.half = Vec3(0.3, 0.6, 0.5);
  s.prims = {a, b};
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 100000; ++i) {
    const Vec3 p(d(rng), d(rng), d(rng));
    CHECK(s.sdf(p) == std::min(a.sdf(p), b.sdf(p)));
  }
}

TEST_CASE("box SDF is 1-Lipschitz along random segments") {
  Rng rng(5);
  Primitive box;
  box.kind = Primitive::Kind::box;
  box.half = Vec3(0.5, 0.7, 0.3);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 p(d(rng), d(rng), d(rng));
    const Vec3 q(d(rng), d(rng), d(rng));
    CHECK(std::abs(box.sdf(p) - box.sdf(q)) <= (p - q).norm() + 1e-12);
  }
}

TEST_CASE("occupancy flips exactly at the SDF sign change along a probe") {
  Rng rng(7);
  AnalyticScene s = random_room(rng, room_box());
  std::uniform_real_distribution<double> d(0.2, 3.8);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 a(d(rng), d(rng), 0.2 + 0.7 * d(rng) / 4.0);
    const Vec3 b(d(rng), d(rng), 0.2 + 0.7 * d(rng) / 4.0);
    for (int k = 0; k <= 50; ++k) {
      const Vec3 p = a + (b - a) * (k / 50.0);
      CHECK(s.occupancy(p) == (s.sdf(p) <= 0.0));
    }
  }
}

TEST_CASE("camera two meters from a wall sees depth 2.000 at the center") {
  AnalyticScene room = make_room(room_box(), 0.2);
  CameraPose pose = look_at(Vec3(2, 2, 1.5), Vec3(4, 2, 1.5));
  Rng rng(11);
  data_io::Image img;
  data_io::DepthImage dep;
  render_gt_frame(room, pose, desk_intr(), RenderNoise{}, rng, img, dep);
  CHECK(std::abs(dep.at(32, 24) - 2.0) <= 1e-4);
}

TEST_CASE("rendered depth matches the analytic wall distance per pixel") {
  AnalyticScene room = make_room(room_box(), 0.2);
  CameraPose pose = look_at(Vec3(2.0, 2.0, 1.5), Vec3(4, 2, 1.5));
  Rng rng(13);
  data_io::Image img;
  data_io::DepthImage dep;
  const Intrinsics intr = desk_intr();
  render_gt_frame(room, pose, intr, RenderNoise{}, rng, img, dep);
  // pixels whose rays hit the +x wall (x = 4 plane)
  for (int v = 18; v < 30; ++v)
    for (int u = 22; u < 42; ++u) {
      const Vec3 dir_cam = intr.backproject(u + 0.5, v + 0.5);
      const Vec3 dir = pose.R * dir_cam.normalized();
      if (dir.x() < 0.5) continue;
      const double t_wall = (4.0 - pose.t.x()) / dir.x();
      const Vec3 hit = pose.t + t_wall * dir;
      if (hit.y() < 0.2 || hit.y() > 3.8 || hit.z() < 0.2 || hit.z() > 2.8)
        continue;
      const double z_depth = t_wall / dir_cam.norm();
      CHECK(std::abs(dep.at(u, v) - z_depth) <= 1e-4);
    }
}

TEST_CASE("noiseless renders are bit-deterministic") {
  Rng rng_scene(17);
  AnalyticScene room = random_room(rng_scene, room_box());
  CameraPose pose = look_at(Vec3(2, 1, 1.5), Vec3(2, 4, 1.2));
  Rng ra(5), rb(5);
  data_io::Image ia, ib;
  data_io::DepthImage da, db;
  render_gt_frame(room, pose, desk_intr(), RenderNoise{}, ra, ia, da);
  render_gt_frame(room, pose, desk_intr(), RenderNoise{}, rb, ib, db);
  CHECK(ia.rgb == ib.rgb);
  CHECK(da.depth == db.depth);
}

TEST_CASE("dropout produces the expected invalid-depth fraction") {
  AnalyticScene room = make_room(room_box(), 0.2);
  CameraPose pose = look_at(Vec3(2, 2, 1.5), Vec3(4, 2, 1.5));
  Rng rng(19);
  RenderNoise noise;
  noise.dropout = 0.1;
  data_io::Image img;
  data_io::DepthImage dep;
  render_gt_frame(room, pose, desk_intr(), noise, rng, img, dep);
  int zeros = 0, total = 0;
  for (double z : dep.depth) {
    ++total;
    if (z == 0.0) ++zeros;
  }
  const double frac = double(zeros) / total;
  CHECK(frac >= 0.09);
  CHECK(frac <= 0.11);
}

TEST_CASE("orbit trajectory follows the parametric path and stays free") {
  Rng rng(23);
  AnalyticScene room = random_room(rng, room_box());
  TrajectorySpec spec;
  spec.kind = TrajectorySpec::Kind::orbit;
  spec.frames = 20;
  spec.target = Vec3(2, 2, 1.2);
  spec.radius = 1.1;
  spec.height = 1.6;
  spec.arc_start = 0.3;
  spec.arc_end = 1.1;
  auto poses = scripted_trajectory(room, spec);
  REQUIRE(poses.size() == 20);
  for (int f = 0; f < 20; ++f) {
    const double a = f / 19.0;
    const double ang = 0.3 + a * 0.8;
    const Vec3 eye(2 + 1.1 * std::cos(ang), 2 + 1.1 * std::sin(ang), 1.6);
    CHECK((poses[f].t - eye).norm() <= 1e-12);
    CHECK(room.sdf(poses[f].t) > 0.1);
  }
  // consecutive deltas match the path formula
  for (int f = 1; f < 20; ++f) {
    const double ang0 = 0.3 + (f - 1) / 19.0 * 0.8;
    const double ang1 = 0.3 + f / 19.0 * 0.8;
    const Vec3 expect(1.1 * (std::cos(ang1) - std::cos(ang0)),
                      1.1 * (std::sin(ang1) - std::sin(ang0)), 0.0);
    CHECK(((poses[f].t - poses[f - 1].t) - expect).norm() <= 1e-12);
  }
}

TEST_CASE("camera inside geometry is rejected") {
  AnalyticScene room = make_room(room_box(), 0.2);
  TrajectorySpec spec;
  spec.kind = TrajectorySpec::Kind::dolly;
  spec.frames = 3;
  spec.start_eye = Vec3(2, 2, -0.1);  // inside the floor
  spec.target = Vec3(2, 2, 1);
  CHECK_THROWS(scripted_trajectory(room, spec));
}

TEST_CASE("dynamic primitive is tracked by the mask channel") {
  AnalyticScene room = make_room(room_box(), 0.2);
  Primitive box;
  box.kind = Primitive::Kind::box;
  box.center = Vec3(3.0, 2.0, 1.5);
  box.half = Vec3(0.25, 0.25, 0.25);
  box.albedo = Vec3(0.9, 0.1, 0.1);
  box.dynamic = true;
  room.prims.push_back(box);

  CameraPose pose = look_at(Vec3(1.2, 2, 1.5), Vec3(4, 2, 1.5));
  DynamicTrack track;
  track.start = Vec3(0, -0.6, 0);
  track.step = Vec3(0, 0.3, 0);
  Rng rng(29);
  auto seq = make_sequence(room, {pose, pose, pose, pose, pose}, desk_intr(),
                           RenderNoise{}, rng, track);
  REQUIRE(seq.dynamic_masks.size() == 5);
  // the box crosses the view; mask must be nonempty mid-sequence and the
  // masked pixels must carry the box albedo tint
  int marked = 0;
  for (std::size_t i = 0; i < seq.dynamic_masks[2].size(); ++i)
    if (seq.dynamic_masks[2][i]) {
      ++marked;
      const int u = static_cast<int>(i) % 64, v = static_cast<int>(i) / 64;
      CHECK(seq.stream.frames[2].color.at(u, v)[0] >
            seq.stream.frames[2].color.at(u, v)[1]);
    }
  CHECK(marked > 10);
  // masks move with the object
  CHECK(seq.dynamic_masks[0] != seq.dynamic_masks[4]);
}
