#pragma once

// Binary containers, all little-endian.
//
// LTNT record:
//   "LTNT" | u8 version (=1) | u8 dtype | u32 N | u32 D | [extension] | payload
//   dtype low bits: 0 = real64, 1 = real32. Bit 0x80 set means an extension
//   block follows D: u32 byte length, then TLV entries {u8 tag, u32 len, bytes}.
//     tag 1: image dims, 3 x u32 (height, width, channels)
//     tag 2: block size, u32
//     tag 3: UTF-8 metadata text
//   payload: N*D values, row-major.
//
// LBND bundle:
//   "LBND" | u32 layer count | per layer:
//     u16 name length | UTF-8 name | u32 layer_index | u32 total_layers | LTNT record

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "curvekit/tensor.hpp"

namespace curvekit {

enum class DType : std::uint8_t { Real64 = 0, Real32 = 1 };

inline constexpr std::uint8_t kLtntVersion = 1;

std::vector<std::uint8_t> encode_tensor(const Tensor2D& t, DType dtype = DType::Real64);

/// Decodes exactly one LTNT record starting at `offset`; advances `offset` past it.
/// `base_offset` is added to reported byte offsets (for records embedded in a bundle).
Tensor2D decode_tensor(std::span<const std::uint8_t> bytes, std::size_t& offset, std::size_t base_offset = 0);

/// Comma-separated, no header, one row per line. Every row must have the same width.
Tensor2D parse_csv(std::string_view text);
std::string format_csv(const Tensor2D& t);

/// Binary when the file starts with "LTNT", CSV when it is plain text.
Tensor2D load_tensor(const std::filesystem::path& path);
void save_tensor(const Tensor2D& t, const std::filesystem::path& path, DType dtype = DType::Real64);

std::vector<std::uint8_t> encode_bundle(std::span<const LayerBundle> layers, DType dtype = DType::Real64);
std::vector<LayerBundle> decode_bundle(std::span<const std::uint8_t> bytes);

/// Layers come back sorted by layer_index.
std::vector<LayerBundle> load_bundle(const std::filesystem::path& path);
void save_bundle(std::span<const LayerBundle> layers, const std::filesystem::path& path,
                 DType dtype = DType::Real64);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace curvekit
