#pragma once
// Versioned binary checkpoint container.
//
// Layout (little-endian):
//   magic "VGSCKPT\0" | u32 version | u32 len + UTF-8 JSON encoder config
//   | u32 epoch | u64 seed | u32 param count
//   | per param: u32 len + name, u32 rank, u64 dims[rank], f32 values
//   | u64 FNV-1a of every preceding byte

#include <cstdint>
#include <filesystem>

#include "vgs/model/encoders.hpp"

namespace vgs::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  VgsModel<float> model;
  std::uint32_t epoch = 0;  // 1-based; 0 for an untrained model
};

void save_checkpoint(const VgsModel<float>& model, std::uint32_t epoch, const std::filesystem::path& path);

/// Validates the whole file before constructing anything; a truncated,
/// corrupted or wrong-version file throws std::runtime_error.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vgs::model
