#include "vgs/model/checkpoint.hpp"

#include <string_view>

#include "vgs/core/binary_io.hpp"
#include "vgs/io/config_json.hpp"

namespace vgs::model {

namespace {

constexpr std::string_view kMagic{"VGSCKPT\0", 8};

}  // namespace

void save_checkpoint(const VgsModel<float>& model, std::uint32_t epoch, const std::filesystem::path& path) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.str(nlohmann::json(model.config()).dump());
  w.u32(epoch);
  w.u64(model.seed());
  w.u32(static_cast<std::uint32_t>(model.parameters().size()));
  for (const auto& p : model.parameters()) {
    w.str(p.name);
    w.u32(static_cast<std::uint32_t>(p.var->tensor.rank()));
    for (std::size_t d : p.var->shape()) w.u64(d);
    w.f32s(p.var->values());
  }
  w.u64(fnv1a(w.buffer()));
  write_file_bytes(path, w.buffer());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto data = read_file_bytes(path);
  const std::string context = "checkpoint " + path.string();
  if (data.size() < kMagic.size() + 12) throw std::runtime_error(context + ": truncated file");
  if (std::string_view(reinterpret_cast<const char*>(data.data()), kMagic.size()) != kMagic) {
    throw std::runtime_error(context + ": not a checkpoint (bad magic)");
  }
  {
    ByteReader version_reader(std::span<const std::uint8_t>(data).subspan(kMagic.size()), context);
    const std::uint32_t version = version_reader.u32();
    if (version != kCheckpointVersion) {
      throw std::runtime_error(context + ": format version " + std::to_string(version) + ", expected " +
                               std::to_string(kCheckpointVersion));
    }
  }
  const std::span<const std::uint8_t> body(data.data(), data.size() - 8);
  ByteReader tail(std::span<const std::uint8_t>(data).subspan(data.size() - 8), context);
  if (tail.u64() != fnv1a(body)) throw std::runtime_error(context + ": checksum mismatch (corrupted or truncated)");

  ByteReader r(body, context);
  r.bytes(kMagic.size());
  r.u32();
  EncoderConfig config;
  try {
    config = nlohmann::json::parse(r.str()).get<EncoderConfig>();
  } catch (const nlohmann::json::exception& e) {
    r.fail(std::string("bad config block: ") + e.what());
  }
  const std::uint32_t epoch = r.u32();
  const std::uint64_t seed = r.u64();
  const std::uint32_t count = r.u32();

  VgsModel<float> model(config, seed);
  if (count != model.parameters().size()) {
    r.fail("holds " + std::to_string(count) + " parameters, architecture expects " +
           std::to_string(model.parameters().size()));
  }
  // Staged so a failure part-way leaves nothing half-loaded.
  std::vector<std::vector<float>> staged(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto& expected = model.parameters()[i];
    const std::string name = r.str();
    if (name != expected.name) r.fail("parameter " + std::to_string(i) + " is " + name + ", expected " + expected.name);
    const std::uint32_t rank = r.u32();
    ad::Shape shape(rank);
    for (auto& d : shape) d = r.u64();
    if (shape != expected.var->shape()) {
      r.fail("parameter " + name + " has shape " + ad::shape_string(shape) + ", expected " +
             ad::shape_string(expected.var->shape()));
    }
    staged[i].resize(expected.var->tensor.size());
    r.f32s(staged[i]);
  }
  if (r.remaining() != 0) r.fail("trailing bytes after parameter table");
  for (std::uint32_t i = 0; i < count; ++i) {
    auto dst = model.parameters()[i].var->tensor.values();
    std::copy(staged[i].begin(), staged[i].end(), dst.begin());
  }
  return Checkpoint{std::move(model), epoch};
}

}  // namespace vgs::model
