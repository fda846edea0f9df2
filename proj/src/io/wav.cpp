#include "vgs/io/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "vgs/core/binary_io.hpp"
#include "vgs/dsp/resample.hpp"

namespace vgs::io {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

double decode_sample(const std::uint8_t* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      std::uint32_t u = 0;
      for (int i = 0; i < 4; ++i) u |= static_cast<std::uint32_t>(p[i]) << (8 * i);
      return std::bit_cast<float>(u);
    }
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(u);
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(le16(p)) / 32768.0;
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default: {
      std::uint32_t u = 0;
      for (int i = 0; i < 4; ++i) u |= static_cast<std::uint32_t>(p[i]) << (8 * i);
      return static_cast<std::int32_t>(u) / 2147483648.0;
    }
  }
}

}  // namespace

dsp::Waveform decode_wav(std::span<const std::uint8_t> bytes, const std::string& context, int target_rate) {
  ByteReader r(bytes, context);
  if (r.bytes(4) != "RIFF") r.fail("not a RIFF file");
  r.u32();
  if (r.bytes(4) != "WAVE") r.fail("not a WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  while (r.remaining() >= 8) {
    const std::string id = r.bytes(4);
    const std::uint32_t size = r.u32();
    if (size > r.remaining()) r.fail("chunk '" + id + "' is truncated");
    const std::size_t start = r.position();
    if (id == "fmt ") {
      if (size < 16) r.fail("fmt chunk too small");
      const std::string fmt = r.bytes(size);
      const auto* p = reinterpret_cast<const std::uint8_t*>(fmt.data());
      format = le16(p);
      channels = le16(p + 2);
      rate = p[4] | (p[5] << 8) | (p[6] << 16) | (static_cast<std::uint32_t>(p[7]) << 24);
      block_align = le16(p + 12);
      bits = le16(p + 14);
      if (format == kFormatExtensible) {
        if (size < 26) r.fail("extensible fmt chunk too small");
        format = le16(p + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) r.fail("data chunk before fmt chunk");
      const bool pcm_ok = format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24 || bits == 32);
      const bool float_ok = format == kFormatFloat && (bits == 32 || bits == 64);
      if (!pcm_ok && !float_ok) {
        r.fail("unsupported codec (format tag " + std::to_string(format) + ", " + std::to_string(bits) + " bits)");
      }
      if (channels == 0 || rate == 0) r.fail("invalid channel count or sample rate");
      const std::size_t sample_bytes = bits / 8;
      if (block_align != channels * sample_bytes) r.fail("inconsistent block alignment");
      const std::size_t frames = size / block_align;
      const auto* data = bytes.data() + start;
      dsp::Waveform wav;
      wav.sample_rate = static_cast<int>(rate);
      wav.samples.resize(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          acc += decode_sample(data + i * block_align + c * sample_bytes, format, bits);
        }
        wav.samples[i] = static_cast<float>(acc / channels);
      }
      if (target_rate > 0 && wav.sample_rate != target_rate) {
        wav.samples = dsp::resample(wav.samples, wav.sample_rate, target_rate);
        wav.sample_rate = target_rate;
      }
      return wav;
    } else {
      r.bytes(size);
    }
    if (size % 2 == 1 && r.remaining() > 0) r.bytes(1);
  }
  r.fail(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

dsp::Waveform read_wav(const std::filesystem::path& path, int target_rate) {
  return decode_wav(read_file_bytes(path), "wav " + path.string(), target_rate);
}

void write_wav(const std::filesystem::path& path, const dsp::Waveform& wav, WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint32_t bytes_per_sample = pcm ? 2 : 4;
  const auto data_size = static_cast<std::uint32_t>(wav.samples.size() * bytes_per_sample);
  ByteWriter w;
  w.bytes("RIFF");
  w.u32(36 + data_size);
  w.bytes("WAVE");
  w.bytes("fmt ");
  w.u32(16);
  auto u16 = [&w](std::uint16_t v) {
    w.buffer().push_back(static_cast<std::uint8_t>(v & 0xff));
    w.buffer().push_back(static_cast<std::uint8_t>(v >> 8));
  };
  u16(pcm ? kFormatPcm : kFormatFloat);
  u16(1);
  w.u32(static_cast<std::uint32_t>(wav.sample_rate));
  w.u32(static_cast<std::uint32_t>(wav.sample_rate) * bytes_per_sample);
  u16(static_cast<std::uint16_t>(bytes_per_sample));
  u16(static_cast<std::uint16_t>(bytes_per_sample * 8));
  w.bytes("data");
  w.u32(data_size);
  for (float s : wav.samples) {
    if (pcm) {
      const long v = std::lround(std::clamp(static_cast<double>(s), -1.0, 1.0) * 32767.0);
      u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    } else {
      w.f32(s);
    }
  }
  write_file_bytes(path, w.buffer());
}

}  // namespace vgs::io
