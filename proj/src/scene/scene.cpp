#include "gridslam/scene/scene.hpp"

#include "gridslam/diffmath/serialize.hpp"

namespace gridslam::scene {

using diffmath::ConfigError;
using diffmath::ParamReader;
using diffmath::ParamWriter;

namespace {

int encoding_dim(const SceneProfile& p) { return 2 * p.n_freq + 3; }

void add_mlp(ParamWriter& w, const std::string& prefix, const MLPParams& mlp) {
  for (std::size_t i = 0; i < mlp.weights.size(); ++i) {
    w.add(prefix + ".w" + std::to_string(i), mlp.weights[i]);
    w.add(prefix + ".b" + std::to_string(i), mlp.biases[i]);
  }
}

MLPParams read_mlp(const ParamReader& r, const std::string& prefix,
                   int blocks) {
  MLPParams mlp;
  for (int i = 0; i < blocks; ++i) {
    mlp.weights.push_back(r.get(prefix + ".w" + std::to_string(i)));
    mlp.biases.push_back(r.get(prefix + ".b" + std::to_string(i)));
  }
  mlp.validate();
  return mlp;
}

}  // namespace

DecoderBundle DecoderBundle::random_init(const SceneProfile& profile,
                                         Rng& rng) {
  DecoderBundle d;
  d.feature_dim = profile.feature_dim;
  const int e = encoding_dim(profile);
  const int fd = profile.feature_dim;
  d.coarse = MLPParams::create_default(3 + fd, 1, rng);
  d.mid = MLPParams::create_default(e + fd, 1, rng);
  d.fine = MLPParams::create_default(e + 2 * fd, 1, rng);
  d.color = MLPParams::create_default(e + fd, 3, rng);
  d.enc_mid = GaussianEncoder::create(profile.n_freq, profile.enc_sigma, rng);
  d.enc_fine = GaussianEncoder::create(profile.n_freq, profile.enc_sigma, rng);
  d.enc_color = GaussianEncoder::create(profile.n_freq, profile.enc_sigma, rng);
  return d;
}

DecoderBundle DecoderBundle::clone() const {
  DecoderBundle d;
  d.feature_dim = feature_dim;
  d.coarse = coarse.clone();
  d.mid = mid.clone();
  d.fine = fine.clone();
  d.color = color.clone();
  d.enc_mid = enc_mid.clone();
  d.enc_fine = enc_fine.clone();
  d.enc_color = enc_color.clone();
  return d;
}

void DecoderBundle::set_requires_grad(bool geometry, bool color_dec) {
  coarse.set_requires_grad(geometry);
  mid.set_requires_grad(geometry);
  fine.set_requires_grad(geometry);
  color.set_requires_grad(color_dec);
  enc_mid.freq.set_requires_grad(false);
  enc_fine.freq.set_requires_grad(false);
  enc_color.freq.set_requires_grad(false);
}

void DecoderBundle::validate(const SceneProfile& profile) const {
  const int e = encoding_dim(profile);
  const int fd = profile.feature_dim;
  auto check = [](const MLPParams& m, int in, int out, const char* name) {
    m.validate();
    if (m.blocks() != MLPParams::kBlocks)
      throw ConfigError(std::string("decoder '") + name +
                        "' has wrong block count");
    if (m.input_width() != in || m.output_width() != out)
      throw ConfigError(std::string("decoder '") + name +
                        "' widths do not match the profile");
    for (int i = 1; i < m.blocks(); ++i)
      if (m.weights[i].dim(0) != MLPParams::kHiddenWidth)
        throw ConfigError(std::string("decoder '") + name +
                          "' hidden width mismatch");
  };
  check(coarse, 3 + fd, 1, "coarse");
  check(mid, e + fd, 1, "mid");
  check(fine, e + 2 * fd, 1, "fine");
  check(color, e + fd, 3, "color");
  if (enc_mid.n_freq() != profile.n_freq)
    throw ConfigError("encoder frequency count does not match the profile");
}

HierarchicalScene HierarchicalScene::clone() const {
  HierarchicalScene s;
  s.profile = profile;
  s.bounds = bounds;
  s.coarse = coarse.clone();
  s.mid = mid.clone();
  s.fine = fine.clone();
  s.color = color.clone();
  s.dec = dec.clone();
  s.coarse_obs = coarse_obs;
  return s;
}

void HierarchicalScene::set_requires_grad_all(bool rg) {
  coarse.features.set_requires_grad(rg);
  mid.features.set_requires_grad(rg);
  fine.features.set_requires_grad(rg);
  color.features.set_requires_grad(rg);
  dec.set_requires_grad(false, rg);
}

std::int64_t HierarchicalScene::coarse_voxel_of(const Vec3& p) const {
  if (!coarse.contains(p)) return -1;
  int cell[3];
  double frac[3];
  coarse.locate(p, cell, frac);
  return coarse.voxel_index(cell[0], cell[1], cell[2]);
}

HierarchicalScene init_scene(const Aabb& bounds, const SceneProfile& profile,
                             DecoderBundle decoders, Rng& rng) {
  decoders.validate(profile);
  HierarchicalScene s;
  s.profile = profile;
  s.bounds = bounds;
  const int fd = profile.feature_dim;
  s.coarse = FeatureGrid::create(GridLevel::coarse, bounds,
                                 profile.coarse_side, fd, profile.init_sigma,
                                 &rng);
  s.mid = FeatureGrid::create(GridLevel::mid, bounds, profile.mid_side, fd,
                              profile.init_sigma, &rng);
  s.fine = FeatureGrid::create(GridLevel::fine, bounds, profile.fine_side, fd,
                               0.0, nullptr);  // zero-init residual level
  s.color = FeatureGrid::create(GridLevel::color, bounds, profile.fine_side,
                                fd, profile.init_sigma, &rng);
  s.dec = std::move(decoders);
  s.dec.set_requires_grad(false, false);
  s.coarse_obs.assign(s.coarse.voxel_count(), 0);
  return s;
}

HierarchicalScene init_scene(const Aabb& bounds, const SceneProfile& profile,
                             const std::string& decoder_path, Rng& rng) {
  DecoderBundle d = load_decoder_bundle(decoder_path);
  d.validate(profile);
  return init_scene(bounds, profile, std::move(d), rng);
}

MidQuery occupancy_mid(Tape* tape, const HierarchicalScene& s,
                       const Tensor& points) {
  using namespace diffmath;
  Tensor enc = positional_encode(tape, s.dec.enc_mid, points);
  Tensor phi1 = trilinear_sample(tape, s.mid, points);
  Tensor z = mlp_forward(tape, s.dec.mid, concat_cols(tape, {enc, phi1}));
  return {sigmoid(tape, z), z};
}

FineQuery occupancy_fine(Tape* tape, const HierarchicalScene& s,
                         const Tensor& points) {
  using namespace diffmath;
  Tensor phi1 = trilinear_sample(tape, s.mid, points);
  Tensor phi2 = trilinear_sample(tape, s.fine, points);

  // mid-level logit
  Tensor enc_m = positional_encode(tape, s.dec.enc_mid, points);
  Tensor z1 = mlp_forward(tape, s.dec.mid, concat_cols(tape, {enc_m, phi1}));

  // fine residual, with the first layer split so the zero-feature baseline
  // shares the (encoding, mid-feature) partial product
  Tensor enc_f = positional_encode(tape, s.dec.enc_fine, points);
  Tensor base_in = concat_cols(tape, {enc_f, phi1});
  const int split = base_in.dim(1);
  const Tensor& w0 = s.dec.fine.weights[0];
  Tensor w0a = slice_rows(tape, w0, 0, split);
  Tensor w0b = slice_rows(tape, w0, split, w0.dim(0));
  Tensor h_base =
      add_rowvec(tape, matmul(tape, base_in, w0a), s.dec.fine.biases[0]);
  Tensor h_res = add(tape, h_base, matmul(tape, phi2, w0b));
  Tensor out_base = mlp_tail_from_hidden(tape, s.dec.fine, h_base);
  Tensor out_res = mlp_tail_from_hidden(tape, s.dec.fine, h_res);
  Tensor residual = sub(tape, out_res, out_base);

  FineQuery q;
  q.residual = residual;
  q.mid_occ = sigmoid(tape, z1);
  q.occ = sigmoid(tape, add(tape, z1, residual));
  return q;
}

Tensor occupancy_coarse(Tape* tape, const HierarchicalScene& s,
                        const Tensor& points) {
  using namespace diffmath;
  Tensor phi0 = trilinear_sample(tape, s.coarse, points);
  Tensor z =
      mlp_forward(tape, s.dec.coarse, concat_cols(tape, {points, phi0}));
  return sigmoid(tape, z);
}

Tensor color_query(Tape* tape, const HierarchicalScene& s,
                   const Tensor& points) {
  using namespace diffmath;
  Tensor enc = positional_encode(tape, s.dec.enc_color, points);
  Tensor psi = trilinear_sample(tape, s.color, points);
  Tensor z = mlp_forward(tape, s.dec.color, concat_cols(tape, {enc, psi}));
  return sigmoid(tape, z);
}

void save_decoder_bundle(const DecoderBundle& d, const std::string& path) {
  ParamWriter w;
  add_mlp(w, "dec.coarse", d.coarse);
  add_mlp(w, "dec.mid", d.mid);
  add_mlp(w, "dec.fine", d.fine);
  add_mlp(w, "dec.color", d.color);
  w.add("enc.mid.freq", d.enc_mid.freq);
  w.add("enc.fine.freq", d.enc_fine.freq);
  w.add("enc.color.freq", d.enc_color.freq);
  w.meta()["kind"] = "decoder_bundle";
  w.meta()["feature_dim"] = d.feature_dim;
  w.meta()["blocks"] = MLPParams::kBlocks;
  w.meta()["hidden"] = MLPParams::kHiddenWidth;
  w.meta()["n_freq"] = d.enc_mid.n_freq();
  w.write(path);
}

DecoderBundle load_decoder_bundle(const std::string& path) {
  ParamReader r = ParamReader::open(path);
  if (r.meta().value("kind", "") != std::string("decoder_bundle"))
    throw ConfigError("'" + path + "' is not a decoder bundle");
  if (r.meta().value("hidden", 0) != MLPParams::kHiddenWidth ||
      r.meta().value("blocks", 0) != MLPParams::kBlocks)
    throw ConfigError("decoder bundle '" + path +
                      "' has unsupported hidden width or block count");
  DecoderBundle d;
  d.feature_dim = r.meta().value("feature_dim", 32);
  d.coarse = read_mlp(r, "dec.coarse", MLPParams::kBlocks);
  d.mid = read_mlp(r, "dec.mid", MLPParams::kBlocks);
  d.fine = read_mlp(r, "dec.fine", MLPParams::kBlocks);
  d.color = read_mlp(r, "dec.color", MLPParams::kBlocks);
  d.enc_mid.freq = r.get("enc.mid.freq");
  d.enc_fine.freq = r.get("enc.fine.freq");
  d.enc_color.freq = r.get("enc.color.freq");
  return d;
}

namespace {

void add_grid(ParamWriter& w, const std::string& prefix,
              const FeatureGrid& g) {
  w.add(prefix + ".features", g.features);
  w.meta()[prefix] = {{"side", g.side},
                      {"origin", {g.origin.x(), g.origin.y(), g.origin.z()}},
                      {"dims", {g.nx, g.ny, g.nz}},
                      {"feature_dim", g.feature_dim}};
}

FeatureGrid read_grid(const ParamReader& r, const std::string& prefix,
                      GridLevel level) {
  const auto& m = r.meta().at(prefix);
  FeatureGrid g;
  g.level = level;
  g.side = m.at("side").get<double>();
  const auto o = m.at("origin");
  g.origin = Vec3(o[0], o[1], o[2]);
  const auto d = m.at("dims");
  g.nx = d[0];
  g.ny = d[1];
  g.nz = d[2];
  g.feature_dim = m.at("feature_dim").get<int>();
  g.features = r.get(prefix + ".features");
  return g;
}

}  // namespace

void save_scene(const HierarchicalScene& s, const std::string& path) {
  ParamWriter w;
  add_grid(w, "grid.coarse", s.coarse);
  add_grid(w, "grid.mid", s.mid);
  add_grid(w, "grid.fine", s.fine);
  add_grid(w, "grid.color", s.color);
  add_mlp(w, "dec.coarse", s.dec.coarse);
  add_mlp(w, "dec.mid", s.dec.mid);
  add_mlp(w, "dec.fine", s.dec.fine);
  add_mlp(w, "dec.color", s.dec.color);
  w.add("enc.mid.freq", s.dec.enc_mid.freq);
  w.add("enc.fine.freq", s.dec.enc_fine.freq);
  w.add("enc.color.freq", s.dec.enc_color.freq);
  Tensor obs = Tensor::zeros({static_cast<int>(s.coarse_obs.size())});
  for (std::size_t i = 0; i < s.coarse_obs.size(); ++i)
    obs.data()[i] = static_cast<double>(s.coarse_obs[i]);
  w.add("coarse_obs", obs);
  w.meta()["kind"] = "scene_checkpoint";
  w.meta()["bounds"] = {{"min", {s.bounds.min.x(), s.bounds.min.y(),
                                 s.bounds.min.z()}},
                        {"max", {s.bounds.max.x(), s.bounds.max.y(),
                                 s.bounds.max.z()}}};
  w.meta()["profile"] = {{"coarse_side", s.profile.coarse_side},
                         {"mid_side", s.profile.mid_side},
                         {"fine_side", s.profile.fine_side},
                         {"feature_dim", s.profile.feature_dim},
                         {"init_sigma", s.profile.init_sigma},
                         {"n_freq", s.profile.n_freq},
                         {"enc_sigma", s.profile.enc_sigma}};
  w.write(path);
}

HierarchicalScene load_scene(const std::string& path) {
  ParamReader r = ParamReader::open(path);
  if (r.meta().value("kind", "") != std::string("scene_checkpoint"))
    throw ConfigError("'" + path + "' is not a scene checkpoint");
  HierarchicalScene s;
  const auto& pm = r.meta().at("profile");
  s.profile.coarse_side = pm.at("coarse_side").get<double>();
  s.profile.mid_side = pm.at("mid_side").get<double>();
  s.profile.fine_side = pm.at("fine_side").get<double>();
  s.profile.feature_dim = pm.at("feature_dim").get<int>();
  s.profile.init_sigma = pm.at("init_sigma").get<double>();
  s.profile.n_freq = pm.at("n_freq").get<int>();
  s.profile.enc_sigma = pm.at("enc_sigma").get<double>();
  const auto& bm = r.meta().at("bounds");
  s.bounds.min = Vec3(bm.at("min")[0], bm.at("min")[1], bm.at("min")[2]);
  s.bounds.max = Vec3(bm.at("max")[0], bm.at("max")[1], bm.at("max")[2]);
  s.coarse = read_grid(r, "grid.coarse", GridLevel::coarse);
  s.mid = read_grid(r, "grid.mid", GridLevel::mid);
  s.fine = read_grid(r, "grid.fine", GridLevel::fine);
  s.color = read_grid(r, "grid.color", GridLevel::color);
  s.dec.feature_dim = s.profile.feature_dim;
  s.dec.coarse = read_mlp(r, "dec.coarse", MLPParams::kBlocks);
  s.dec.mid = read_mlp(r, "dec.mid", MLPParams::kBlocks);
  s.dec.fine = read_mlp(r, "dec.fine", MLPParams::kBlocks);
  s.dec.color = read_mlp(r, "dec.color", MLPParams::kBlocks);
  s.dec.enc_mid.freq = r.get("enc.mid.freq");
  s.dec.enc_fine.freq = r.get("enc.fine.freq");
  s.dec.enc_color.freq = r.get("enc.color.freq");
  Tensor obs = r.get("coarse_obs");
  s.coarse_obs.resize(obs.numel());
  for (std::int64_t i = 0; i < obs.numel(); ++i)
    s.coarse_obs[i] = static_cast<std::int64_t>(obs.data()[i]);
  return s;
}

}  // namespace gridslam::scene
