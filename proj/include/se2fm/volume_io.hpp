#pragma once

// On-disk volume format shared by cost volumes and distance fields:
//
//   header.json  {"nx":..,"ny":..,"ntheta":..,"hx":..,"hy":..,
//                 "origin_x":..,"origin_y":..,"dtype":"f32",
//                 "order":"x-fastest","data":"<path relative to header>"}
//   data file    nx*ny*ntheta little-endian IEEE floats, x fastest, then y,
//                then theta. +inf is stored as IEEE infinity.
//
// "dtype" may also be "f64" for lossless distance fields.

#include <filesystem>
#include <string>
#include <vector>

#include "se2fm/grid.hpp"

namespace se2fm {

enum class DType { kF32, kF64 };

struct VolumeHeader {
  GridSpec grid;
  DType dtype = DType::kF32;
  std::string data;  ///< path relative to the header's directory
};

VolumeHeader read_header(const std::filesystem::path& header_path);

/// Reads the raw values named by a header. Throws kMalformedHeader,
/// kSizeMismatch or kIoFailure.
std::vector<double> read_volume(const std::filesystem::path& header_path,
                                VolumeHeader* header_out = nullptr);

/// Writes `<header_path>` and a sibling data file `<stem>.raw`. Returns the
/// data file path.
std::filesystem::path write_volume(const std::filesystem::path& header_path,
                                   const GridSpec& grid,
                                   const std::vector<double>& values,
                                   DType dtype = DType::kF32);

/// Loads and validates a cost volume (values in (0, 1]).
CostVolume load_cost(const std::filesystem::path& header_path);
std::filesystem::path save_cost(const CostVolume& cost,
                                const std::filesystem::path& header_path);

DistanceField load_field(const std::filesystem::path& header_path);
std::filesystem::path save_field(const DistanceField& field,
                                 const std::filesystem::path& header_path,
                                 DType dtype = DType::kF32);

}  // namespace se2fm
