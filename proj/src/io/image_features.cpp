#include "vgs/io/image_features.hpp"

#include <cmath>
#include <stdexcept>
#include <string_view>

#include "vgs/core/binary_io.hpp"

namespace vgs::io {

namespace {
constexpr std::string_view kMagic = "VGSIMGP1";
constexpr std::size_t kHeaderSize = 8 + 8 + 4;
}  // namespace

void write_image_feature_pack(const std::filesystem::path& path, std::size_t dim,
                              std::span<const ImageFeatureEntry> entries) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u64(entries.size());
  w.u32(static_cast<std::uint32_t>(dim));
  for (const auto& e : entries) {
    if (e.values.size() != dim) {
      throw std::invalid_argument("image " + e.image_id + " has " + std::to_string(e.values.size()) +
                                  " features, pack dimension is " + std::to_string(dim));
    }
    w.f32s(e.values);
  }
  for (const auto& e : entries) w.str(e.image_id);
  write_file_bytes(path, w.buffer());
}

ImageFeaturePack ImageFeaturePack::open(const std::filesystem::path& path) {
  ImageFeaturePack pack;
  pack.path_ = path;
  pack.stream_ = std::make_unique<std::ifstream>(path, std::ios::binary);
  pack.mutex_ = std::make_unique<std::mutex>();
  auto& in = *pack.stream_;
  const std::string context = "image feature pack " + path.string();
  if (!in) throw std::runtime_error("cannot open " + context);
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);

  std::vector<std::uint8_t> header(std::min(file_size, kHeaderSize));
  in.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(header.size()));
  ByteReader h(header, context);
  if (h.bytes(kMagic.size()) != kMagic) h.fail("bad magic");
  const std::uint64_t count = h.u64();
  pack.dim_ = h.u32();
  const std::size_t table_offset = kHeaderSize + count * pack.dim_ * 4;
  if (table_offset > file_size) h.fail("truncated vector block");

  std::vector<std::uint8_t> table(file_size - table_offset);
  in.seekg(static_cast<std::streamoff>(table_offset));
  in.read(reinterpret_cast<char*>(table.data()), static_cast<std::streamsize>(table.size()));
  ByteReader t(table, context);
  pack.ids_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string id = t.str();
    if (!pack.index_.emplace(id, i).second) t.fail("duplicate image id " + id);
    pack.ids_.push_back(std::move(id));
  }
  if (t.remaining() != 0) t.fail("trailing bytes after id table");
  return pack;
}

ImageFeatureVector ImageFeaturePack::load(const std::string& image_id) const {
  const auto it = index_.find(image_id);
  if (it == index_.end()) throw std::out_of_range("image id " + image_id + " not found in " + path_.string());
  std::vector<std::uint8_t> raw(dim_ * 4);
  {
    std::lock_guard lock(*mutex_);
    stream_->clear();
    stream_->seekg(static_cast<std::streamoff>(kHeaderSize + it->second * dim_ * 4));
    stream_->read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!*stream_) throw std::runtime_error("failed reading image " + image_id + " from " + path_.string());
  }
  ByteReader r(raw, "image " + image_id);
  ImageFeatureVector out{std::vector<float>(dim_)};
  r.f32s(out.values);
  for (float v : out.values) {
    if (!std::isfinite(v)) throw std::runtime_error("image " + image_id + " has non-finite feature values");
  }
  return out;
}

std::vector<ImageFeatureVector> ImageFeaturePack::load_many(std::span<const std::string> image_ids) const {
  std::vector<ImageFeatureVector> out;
  out.reserve(image_ids.size());
  for (const auto& id : image_ids) out.push_back(load(id));
  return out;
}

}  // namespace vgs::io
