#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "gridslam/diffmath/tensor.hpp"

namespace gridslam::diffmath {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat binary parameter container: magic, version, JSON header (tensor
// names, shapes, dtypes, offsets, free-form metadata) followed by raw
// little-endian values. f64 payloads round-trip bit-exactly.
class ParamWriter {
 public:
  void add(const std::string& name, const Tensor& t, DType dtype = DType::f64);
  nlohmann::json& meta() { return meta_; }
  void write(const std::string& path) const;

 private:
  struct Entry {
    Tensor tensor;
    DType dtype;
  };
  std::map<std::string, Entry> entries_;
  nlohmann::json meta_ = nlohmann::json::object();
};

class ParamReader {
 public:
  static ParamReader open(const std::string& path);

  bool has(const std::string& name) const;
  Tensor get(const std::string& name) const;
  std::vector<std::string> names() const;
  const nlohmann::json& meta() const { return meta_; }

 private:
  struct Entry {
    Shape shape;
    DType dtype;
    std::vector<double> values;
  };
  std::map<std::string, Entry> entries_;
  nlohmann::json meta_;
};

}  // namespace gridslam::diffmath
