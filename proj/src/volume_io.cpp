#include "se2fm/volume_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "se2fm/error.hpp"

namespace se2fm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T to_little_endian(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    auto u = std::bit_cast<U>(v);
    U r = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
      r = (r << 8) | (u & 0xff);
      u >>= 8;
    }
    return std::bit_cast<T>(r);
  }
}

std::size_t dtype_size(DType d) { return d == DType::kF32 ? 4 : 8; }

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::kMalformedHeader,
                std::string("volume header lacks \"") + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedHeader,
                std::string("volume header field \"") + key + "\": " + e.what());
  }
}

}  // namespace

VolumeHeader read_header(const fs::path& header_path) {
  std::ifstream in(header_path);
  if (!in) {
    throw Error(ErrorCode::kIoFailure,
                "cannot open volume header " + header_path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedHeader,
                "volume header " + header_path.string() + ": " + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::kMalformedHeader, "volume header is not an object");
  }
  VolumeHeader h;
  h.grid.nx = required<int>(j, "nx");
  h.grid.ny = required<int>(j, "ny");
  h.grid.ntheta = required<int>(j, "ntheta");
  h.grid.hx = required<double>(j, "hx");
  h.grid.hy = required<double>(j, "hy");
  h.grid.origin_x = required<double>(j, "origin_x");
  h.grid.origin_y = required<double>(j, "origin_y");
  const auto dtype = required<std::string>(j, "dtype");
  if (dtype == "f32") {
    h.dtype = DType::kF32;
  } else if (dtype == "f64") {
    h.dtype = DType::kF64;
  } else {
    throw Error(ErrorCode::kMalformedHeader, "unsupported dtype " + dtype);
  }
  if (required<std::string>(j, "order") != "x-fastest") {
    throw Error(ErrorCode::kMalformedHeader, "order must be \"x-fastest\"");
  }
  h.data = required<std::string>(j, "data");
  try {
    h.grid.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedHeader, e.what());
  }
  return h;
}

std::vector<double> read_volume(const fs::path& header_path,
                                VolumeHeader* header_out) {
  const VolumeHeader h = read_header(header_path);
  const fs::path data_path = header_path.parent_path() / h.data;
  std::ifstream in(data_path, std::ios::binary | std::ios::ate);
  if (!in) {
    throw Error(ErrorCode::kIoFailure,
                "cannot open volume data " + data_path.string());
  }
  const auto bytes = static_cast<std::size_t>(in.tellg());
  const std::size_t expected = h.grid.size() * dtype_size(h.dtype);
  if (bytes != expected) {
    throw Error(ErrorCode::kSizeMismatch,
                "volume data " + data_path.string() + " has " +
                    std::to_string(bytes) + " bytes, header implies " +
                    std::to_string(expected));
  }
  in.seekg(0);
  std::vector<char> raw(bytes);
  if (!in.read(raw.data(), static_cast<std::streamsize>(bytes))) {
    throw Error(ErrorCode::kIoFailure, "short read on " + data_path.string());
  }
  std::vector<double> values(h.grid.size());
  if (h.dtype == DType::kF32) {
    for (std::size_t n = 0; n < values.size(); ++n) {
      float f;
      std::memcpy(&f, raw.data() + 4 * n, 4);
      values[n] = to_little_endian(f);
    }
  } else {
    for (std::size_t n = 0; n < values.size(); ++n) {
      double d;
      std::memcpy(&d, raw.data() + 8 * n, 8);
      values[n] = to_little_endian(d);
    }
  }
  if (header_out != nullptr) *header_out = h;
  return values;
}

fs::path write_volume(const fs::path& header_path, const GridSpec& grid,
                      const std::vector<double>& values, DType dtype) {
  grid.validate();
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::kSizeMismatch, "write_volume: value count mismatch");
  }
  fs::path data_name = header_path.filename();
  data_name.replace_extension(".raw");
  const fs::path data_path = header_path.parent_path() / data_name;

  json j;
  j["nx"] = grid.nx;
  j["ny"] = grid.ny;
  j["ntheta"] = grid.ntheta;
  j["hx"] = grid.hx;
  j["hy"] = grid.hy;
  j["origin_x"] = grid.origin_x;
  j["origin_y"] = grid.origin_y;
  j["dtype"] = dtype == DType::kF32 ? "f32" : "f64";
  j["order"] = "x-fastest";
  j["data"] = data_name.string();

  std::vector<char> raw(values.size() * dtype_size(dtype));
  if (dtype == DType::kF32) {
    for (std::size_t n = 0; n < values.size(); ++n) {
      const float f = to_little_endian(static_cast<float>(values[n]));
      std::memcpy(raw.data() + 4 * n, &f, 4);
    }
  } else {
    for (std::size_t n = 0; n < values.size(); ++n) {
      const double d = to_little_endian(values[n]);
      std::memcpy(raw.data() + 8 * n, &d, 8);
    }
  }
  std::ofstream data(data_path, std::ios::binary | std::ios::trunc);
  if (!data.write(raw.data(), static_cast<std::streamsize>(raw.size()))) {
    throw Error(ErrorCode::kIoFailure, "cannot write " + data_path.string());
  }
  std::ofstream header(header_path, std::ios::trunc);
  if (!(header << j.dump(2) << '\n')) {
    throw Error(ErrorCode::kIoFailure, "cannot write " + header_path.string());
  }
  return data_path;
}

CostVolume load_cost(const fs::path& header_path) {
  VolumeHeader h;
  CostVolume c;
  c.values = read_volume(header_path, &h);
  c.grid = h.grid;
  c.validate();
  return c;
}

fs::path save_cost(const CostVolume& cost, const fs::path& header_path) {
  return write_volume(header_path, cost.grid, cost.values, DType::kF32);
}

DistanceField load_field(const fs::path& header_path) {
  VolumeHeader h;
  DistanceField f;
  f.values = read_volume(header_path, &h);
  f.grid = h.grid;
  return f;
}

fs::path save_field(const DistanceField& field, const fs::path& header_path,
                    DType dtype) {
  return write_volume(header_path, field.grid, field.values, dtype);
}

}  // namespace se2fm
