#include "vgs/io/feature_store.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "vgs/core/binary_io.hpp"
#include "vgs/io/tsv.hpp"

namespace vgs::io {

namespace {
constexpr std::string_view kMagic = "VGSFEAT1";
}

std::string feature_file_name(const std::string& caption_id) {
  std::string name;
  for (char c : caption_id) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                      c == '_' || c == '.';
    if (safe) {
      name += c;
    } else {
      // Percent-escaped so distinct ids never share a file.
      static constexpr char kHex[] = "0123456789ABCDEF";
      const auto byte = static_cast<unsigned char>(c);
      name += '%';
      name += kHex[byte >> 4];
      name += kHex[byte & 15];
    }
  }
  return name + ".feat";
}

void write_feature_file(const std::filesystem::path& path, const dsp::AudioFeatures& features) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(static_cast<std::uint32_t>(features.frames.rows()));
  w.u32(static_cast<std::uint32_t>(features.frames.cols()));
  w.f32s(features.frames.data());
  write_file_bytes(path, w.buffer());
}

dsp::AudioFeatures read_feature_file(const std::filesystem::path& path) {
  const auto data = read_file_bytes(path);
  ByteReader r(data, "feature file " + path.string());
  if (r.bytes(kMagic.size()) != kMagic) r.fail("bad magic");
  const std::uint32_t frames = r.u32();
  const std::uint32_t width = r.u32();
  if (width != dsp::kFeatureWidth) r.fail("width " + std::to_string(width) + ", expected 39");
  if (r.remaining() != static_cast<std::size_t>(frames) * width * 4) r.fail("payload size does not match header");
  dsp::AudioFeatures out;
  out.frames = Matrix<float>(frames, width);
  r.f32s(out.frames.data());
  return out;
}

void write_feature_index(const std::filesystem::path& dir, const std::vector<FeatureIndexEntry>& entries) {
  std::ostringstream out;
  out << "caption_id\tfile\tframes\n";
  for (const auto& e : entries) out << e.caption_id << '\t' << e.file << '\t' << e.frames << '\n';
  const std::string text = out.str();
  write_file_bytes(dir / "index.tsv",
                   std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

FeatureStore FeatureStore::open(const std::filesystem::path& dir) {
  FeatureStore store;
  store.dir_ = dir;
  const auto table = read_tsv(dir / "index.tsv");
  const std::size_t id_col = table.column("caption_id");
  const std::size_t file_col = table.column("file");
  const std::size_t frames_col = table.column("frames");
  for (const auto& row : table.rows) {
    FeatureIndexEntry e{row.fields[id_col], row.fields[file_col], 0};
    e.frames = parse_size(row.fields[frames_col], table.source, row.line);
    if (!store.entries_.emplace(e.caption_id, e).second) {
      throw std::runtime_error(table.source + ":" + std::to_string(row.line) + ": duplicate caption id " + e.caption_id);
    }
  }
  return store;
}

dsp::AudioFeatures FeatureStore::load(const std::string& caption_id) const {
  const auto it = entries_.find(caption_id);
  if (it == entries_.end()) throw std::out_of_range("no features for caption " + caption_id + " in " + dir_.string());
  return read_feature_file(dir_ / it->second.file);
}

}  // namespace vgs::io
