#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "vgs/dsp/features.hpp"

namespace vgs::io {

enum class WavEncoding { kPcm16, kFloat32 };

/// Decodes RIFF/WAVE data: PCM 8/16/24/32-bit or IEEE float 32/64-bit,
/// including WAVE_FORMAT_EXTENSIBLE. Channels are averaged to mono and the
/// result is resampled to `target_rate` (0 keeps the file's rate).
dsp::Waveform decode_wav(std::span<const std::uint8_t> bytes, const std::string& context, int target_rate = 16000);
dsp::Waveform read_wav(const std::filesystem::path& path, int target_rate = 16000);

void write_wav(const std::filesystem::path& path, const dsp::Waveform& wav, WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace vgs::io
