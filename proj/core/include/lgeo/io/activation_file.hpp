#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "lgeo/covariance.hpp"

namespace lgeo::io {

// LGA1 layout, little-endian:
//   0  char[4]  magic "LGA1"
//   4  u16      version (1)
//   6  u16      dtype (1 = float32)
//   8  u32      rows T
//  12  u32      cols d
//  16  u16      layer
//  18  u16      model_id length n
//  20  u8[n]    model_id, UTF-8
//      zero padding up to the next multiple of 16
//      float32[T*d] payload, row-major
inline constexpr char kActivationMagic[4] = {'L', 'G', 'A', '1'};
inline constexpr std::uint16_t kActivationVersion = 1;
inline constexpr std::uint16_t kDtypeFloat32 = 1;

struct ActivationFileHeader {
  std::uint16_t version = kActivationVersion;
  std::uint16_t dtype = kDtypeFloat32;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint16_t layer = 0;
  std::string model_id;

  std::uint64_t payload_offset() const noexcept;
  std::uint64_t payload_bytes() const;  // throws FormatError on overflow
};

ActivationFileHeader read_activation_header(std::istream& in);

ActivationMatrix read_activations(std::istream& in);
ActivationMatrix read_activations(const std::filesystem::path& path);

/// Entries are stored as float32; values that are not representable are rounded.
void write_activations(const ActivationMatrix& X, std::ostream& out);
void write_activations(const ActivationMatrix& X, const std::filesystem::path& path);

}  // namespace lgeo::io
