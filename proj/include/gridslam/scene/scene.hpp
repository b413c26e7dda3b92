#pragma once

#include <string>

#include "gridslam/diffmath/encoder.hpp"
#include "gridslam/diffmath/mlp.hpp"
#include "gridslam/diffmath/serialize.hpp"
#include "gridslam/scene/feature_grid.hpp"

namespace gridslam::scene {

using diffmath::GaussianEncoder;
using diffmath::MLPParams;

// Grid side lengths and initialization parameters.
struct SceneProfile {
  double coarse_side = 2.0;
  double mid_side = 0.32;
  double fine_side = 0.16;  // color grid shares the fine side
  int feature_dim = 32;
  double init_sigma = 0.01;
  int n_freq = 45;          // positional encoding rows; output dim 2*45+3 = 93
  double enc_sigma = 5.0;

  static SceneProfile small_scene() { return {}; }
  static SceneProfile tum() {
    SceneProfile p;
    p.mid_side = 0.16;
    p.fine_side = 0.08;
    return p;
  }
  // Single-voxel grids for gradient checking; tiny encoder.
  static SceneProfile toy() {
    SceneProfile p;
    p.coarse_side = p.mid_side = p.fine_side = 1.0;
    p.n_freq = 4;
    p.enc_sigma = 1.0;
    return p;
  }
};

// The four decoders with their positional encoders (the coarse decoder takes
// the raw point instead of an encoding).
struct DecoderBundle {
  MLPParams coarse, mid, fine, color;
  GaussianEncoder enc_mid, enc_fine, enc_color;
  int feature_dim = 32;

  static DecoderBundle random_init(const SceneProfile& profile, Rng& rng);
  DecoderBundle clone() const;
  void set_requires_grad(bool geometry, bool color_dec);
  void validate(const SceneProfile& profile) const;
};

struct HierarchicalScene {
  SceneProfile profile;
  Aabb bounds;
  FeatureGrid coarse, mid, fine, color;
  DecoderBundle dec;
  std::vector<std::int64_t> coarse_obs;  // per-coarse-voxel observation count

  HierarchicalScene clone() const;
  void set_requires_grad_all(bool rg);
  std::int64_t coarse_voxel_of(const Vec3& p) const;  // -1 when outside
};

// Coarse/mid/color grids random (zero-mean, profile sigma), fine grid zeros.
HierarchicalScene init_scene(const Aabb& bounds, const SceneProfile& profile,
                             DecoderBundle decoders, Rng& rng);
// Decoders loaded from a pretrained bundle file; throws ConfigError when the
// file is missing or does not match the profile.
HierarchicalScene init_scene(const Aabb& bounds, const SceneProfile& profile,
                             const std::string& decoder_path, Rng& rng);

struct MidQuery {
  Tensor occ;    // [n,1] in (0,1)
  Tensor logit;  // pre-squash
};
struct FineQuery {
  Tensor occ;       // final occupancy, sigmoid(mid_logit + residual)
  Tensor residual;  // fine-level logit offset; exactly zero at zero features
  Tensor mid_occ;
};

MidQuery occupancy_mid(Tape* tape, const HierarchicalScene& s,
                       const Tensor& points);
FineQuery occupancy_fine(Tape* tape, const HierarchicalScene& s,
                         const Tensor& points);
Tensor occupancy_coarse(Tape* tape, const HierarchicalScene& s,
                        const Tensor& points);
Tensor color_query(Tape* tape, const HierarchicalScene& s,
                   const Tensor& points);

// Decoder bundle file: the four decoders plus encoder frequencies; load
// validates block count and hidden width against the container schema.
void save_decoder_bundle(const DecoderBundle& d, const std::string& path);
DecoderBundle load_decoder_bundle(const std::string& path);

// Scene checkpoint (grids, decoders, encoders, bounds, profile, counters).
void save_scene(const HierarchicalScene& s, const std::string& path);
HierarchicalScene load_scene(const std::string& path);

}  // namespace gridslam::scene
