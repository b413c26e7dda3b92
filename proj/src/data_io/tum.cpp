#include "gridslam/data_io/tum.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gridslam/data_io/trajectory.hpp"

namespace gridslam::data_io {

namespace fs = std::filesystem;

namespace {

std::vector<std::pair<double, std::string>> read_index(const fs::path& file) {
  std::ifstream in(file);
  if (!in)
    throw IngestError(
        "missing index file '" + file.string() +
        "' (expected TUM layout: rgb.txt, depth.txt, image directories)");
  std::vector<std::pair<double, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double ts;
    std::string path;
    if (ss >> ts >> path) out.emplace_back(ts, path);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Image read_color_png(const fs::path& file) {
  cv::Mat m = cv::imread(file.string(), cv::IMREAD_COLOR);
  if (m.empty()) throw IngestError("cannot read image '" + file.string() + "'");
  Image img = Image::create(m.cols, m.rows);
  for (int v = 0; v < m.rows; ++v)
    for (int u = 0; u < m.cols; ++u) {
      const cv::Vec3b& bgr = m.at<cv::Vec3b>(v, u);
      double* rgb = img.at(u, v);
      rgb[0] = bgr[2] / 255.0;
      rgb[1] = bgr[1] / 255.0;
      rgb[2] = bgr[0] / 255.0;
    }
  return img;
}

DepthImage read_depth_png(const fs::path& file, double scale) {
  cv::Mat m = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
  if (m.empty() || m.type() != CV_16UC1)
    throw IngestError("cannot read 16-bit depth '" + file.string() + "'");
  DepthImage d = DepthImage::create(m.cols, m.rows);
  for (int v = 0; v < m.rows; ++v)
    for (int u = 0; u < m.cols; ++u)
      d.at(u, v) = m.at<std::uint16_t>(v, u) / scale;
  return d;
}

}  // namespace

FrameStream load_tum_sequence(const std::string& dir,
                              const Intrinsics& intrinsics, double max_dt,
                              double depth_scale) {
  const fs::path root(dir);
  auto rgb = read_index(root / "rgb.txt");
  auto dep = read_index(root / "depth.txt");
  if (rgb.empty() || dep.empty())
    throw IngestError("empty rgb/depth index in '" + dir + "'");

  FrameStream stream;
  stream.intrinsics = intrinsics;
  stream.depth_scale = depth_scale;

  // associate each color frame with the nearest depth frame within max_dt
  std::vector<char> depth_used(dep.size(), 0);
  for (const auto& [ts, rgb_path] : rgb) {
    auto it = std::lower_bound(
        dep.begin(), dep.end(), std::make_pair(ts, std::string()));
    double best_dt = std::numeric_limits<double>::infinity();
    std::size_t best = dep.size();
    for (int off = -1; off <= 1; ++off) {
      const auto cand = it + off;
      if (cand < dep.begin() || cand >= dep.end()) continue;
      const double dt = std::abs(cand->first - ts);
      const std::size_t idx = cand - dep.begin();
      if (dt < best_dt && !depth_used[idx]) {
        best_dt = dt;
        best = idx;
      }
    }
    if (best == dep.size() || best_dt > max_dt) continue;  // unpaired: drop
    depth_used[best] = 1;
    Frame f;
    f.timestamp = ts;
    f.color = read_color_png(root / rgb_path);
    f.depth = read_depth_png(root / dep[best].second, depth_scale);
    stream.frames.push_back(std::move(f));
  }
  if (stream.frames.empty())
    throw IngestError("no associable rgb/depth pairs in '" + dir + "'");
  return stream;
}

std::optional<Trajectory> load_tum_groundtruth(const std::string& dir) {
  const fs::path file = fs::path(dir) / "groundtruth.txt";
  if (!fs::exists(file)) return std::nullopt;
  return load_trajectory(file.string());
}

std::optional<Intrinsics> load_tum_intrinsics(const std::string& dir) {
  const fs::path file = fs::path(dir) / "intrinsics.txt";
  std::ifstream in(file);
  if (!in) return std::nullopt;
  Intrinsics intr;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    if (ss >> intr.fx >> intr.fy >> intr.cx >> intr.cy >> intr.width >>
        intr.height)
      return intr;
  }
  return std::nullopt;
}

void write_tum_dataset(const FrameStream& stream, const Trajectory& gt,
                       const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root / "rgb");
  fs::create_directories(root / "depth");
  std::ofstream rgb_idx(root / "rgb.txt"), dep_idx(root / "depth.txt");
  rgb_idx << "# color images\n# timestamp filename\n";
  dep_idx << "# depth maps\n# timestamp filename\n";
  char name[64];
  for (const auto& f : stream.frames) {
    snprintf(name, sizeof(name), "%.6f.png", f.timestamp);
    cv::Mat color(f.color.height, f.color.width, CV_8UC3);
    for (int v = 0; v < f.color.height; ++v)
      for (int u = 0; u < f.color.width; ++u) {
        const double* rgb = f.color.at(u, v);
        color.at<cv::Vec3b>(v, u) =
            cv::Vec3b(uchar(std::lround(std::clamp(rgb[2], 0.0, 1.0) * 255)),
                      uchar(std::lround(std::clamp(rgb[1], 0.0, 1.0) * 255)),
                      uchar(std::lround(std::clamp(rgb[0], 0.0, 1.0) * 255)));
      }
    cv::imwrite((root / "rgb" / name).string(), color);
    rgb_idx << std::fixed;
    rgb_idx.precision(6);
    rgb_idx << f.timestamp << " rgb/" << name << "\n";

    cv::Mat depth(f.depth.height, f.depth.width, CV_16UC1);
    for (int v = 0; v < f.depth.height; ++v)
      for (int u = 0; u < f.depth.width; ++u) {
        const double meters = std::clamp(f.depth.at(u, v), 0.0, 13.0);
        depth.at<std::uint16_t>(v, u) =
            static_cast<std::uint16_t>(std::lround(meters * stream.depth_scale));
      }
    cv::imwrite((root / "depth" / name).string(), depth);
    dep_idx << std::fixed;
    dep_idx.precision(6);
    dep_idx << f.timestamp << " depth/" << name << "\n";
  }
  if (!gt.empty()) write_trajectory(gt, (root / "groundtruth.txt").string());
  std::ofstream intr(root / "intrinsics.txt");
  intr << "# fx fy cx cy width height\n";
  intr << stream.intrinsics.fx << " " << stream.intrinsics.fy << " "
       << stream.intrinsics.cx << " " << stream.intrinsics.cy << " "
       << stream.intrinsics.width << " " << stream.intrinsics.height << "\n";
}

}  // namespace gridslam::data_io
