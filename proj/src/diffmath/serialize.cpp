#include "gridslam/diffmath/serialize.hpp"

#include <cstring>
#include <fstream>

namespace gridslam::diffmath {

namespace {

constexpr char kMagic[4] = {'G', 'S', 'P', 'C'};
constexpr std::uint32_t kVersion = 1;

std::size_t dtype_bytes(DType d) { return d == DType::f64 ? 8 : 4; }

std::string dtype_name(DType d) { return d == DType::f64 ? "f64" : "f32"; }

DType dtype_from_name(const std::string& s) {
  if (s == "f64") return DType::f64;
  if (s == "f32") return DType::f32;
  throw ConfigError("unknown dtype '" + s + "' in parameter container");
}

}  // namespace

void ParamWriter::add(const std::string& name, const Tensor& t, DType dtype) {
  if (entries_.count(name))
    throw ConfigError("duplicate tensor name '" + name + "'");
  entries_[name] = Entry{t, dtype};
}

void ParamWriter::write(const std::string& path) const {
  nlohmann::json header;
  header["tensors"] = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto& [name, e] : entries_) {
    const std::uint64_t nbytes = e.tensor.numel() * dtype_bytes(e.dtype);
    header["tensors"][name] = {{"dtype", dtype_name(e.dtype)},
                               {"shape", e.tensor.shape()},
                               {"offset", offset},
                               {"nbytes", nbytes}};
    offset += nbytes;
  }
  header["meta"] = meta_;
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), 4);
  const std::uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), 8);
  out.write(hs.data(), hs.size());
  for (const auto& [name, e] : entries_) {
    (void)name;
    if (e.dtype == DType::f64) {
      out.write(reinterpret_cast<const char*>(e.tensor.data()),
                e.tensor.numel() * 8);
    } else {
      std::vector<float> f(e.tensor.numel());
      for (std::int64_t i = 0; i < e.tensor.numel(); ++i)
        f[i] = static_cast<float>(e.tensor.data()[i]);
      out.write(reinterpret_cast<const char*>(f.data()), f.size() * 4);
    }
  }
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

ParamReader ParamReader::open(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open parameter container '" + path +
                      "' (expected binary container with GSPC magic)");
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t hlen = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&hlen), 8);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("'" + path + "' is not a parameter container");
  if (version != kVersion)
    throw ConfigError("unsupported container version in '" + path + "'");
  std::string hs(hlen, '\0');
  in.read(hs.data(), hlen);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("corrupt container header in '" + path +
                      "': " + e.what());
  }

  const std::streampos payload_start = in.tellg();
  ParamReader r;
  r.meta_ = header.value("meta", nlohmann::json::object());
  for (const auto& [name, spec] : header.at("tensors").items()) {
    Entry e;
    e.shape = spec.at("shape").get<Shape>();
    e.dtype = dtype_from_name(spec.at("dtype").get<std::string>());
    const std::uint64_t offset = spec.at("offset").get<std::uint64_t>();
    const std::int64_t n = shape_numel(e.shape);
    e.values.resize(n);
    in.seekg(payload_start + std::streampos(offset));
    if (e.dtype == DType::f64) {
      in.read(reinterpret_cast<char*>(e.values.data()), n * 8);
    } else {
      std::vector<float> f(n);
      in.read(reinterpret_cast<char*>(f.data()), n * 4);
      for (std::int64_t i = 0; i < n; ++i) e.values[i] = f[i];
    }
    if (!in)
      throw ConfigError("truncated payload for tensor '" + name + "' in '" +
                        path + "'");
    r.entries_[name] = std::move(e);
  }
  return r;
}

bool ParamReader::has(const std::string& name) const {
  return entries_.count(name) > 0;
}

Tensor ParamReader::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end())
    throw ConfigError("tensor '" + name + "' missing from container");
  return Tensor::from_values(it->second.shape, it->second.values);
}

std::vector<std::string> ParamReader::names() const {
  std::vector<std::string> out;
  for (const auto& [name, e] : entries_) {
    (void)e;
    out.push_back(name);
  }
  return out;
}

}  // namespace gridslam::diffmath
