#include <doctest.h>

#include <fstream>

#include "support/synthetic.hpp"
#include "vgs/core/binary_io.hpp"
#include "vgs/model/checkpoint.hpp"

using namespace vgs;

namespace {

model::EncoderConfig config() {
  model::EncoderConfig cfg;
  cfg.conv_channels = 6;
  cfg.lstm_hidden = 4;
  cfg.attention_hidden = 3;
  cfg.embed_dim = 5;
  cfg.image_dim = 9;
  return cfg;
}

}  // namespace

TEST_SUITE("checkpoint") {
  TEST_CASE("round trip gives bit-identical encodings") {
    const auto dir = testing::scratch_dir("ckpt_roundtrip");
    const model::VgsModel<float> m(config(), 17);
    model::save_checkpoint(m, 7, dir / "m.ckpt");
    const auto loaded = model::load_checkpoint(dir / "m.ckpt");
    CHECK(loaded.epoch == 7);
    CHECK(loaded.model.config() == m.config());
    CHECK(loaded.model.seed() == 17);
    Rng rng(1);
    const auto f = testing::random_features(20, rng);
    CHECK(loaded.model.embed_caption(f) == m.embed_caption(f));
    const std::vector<float> img(9, 0.25f);
    CHECK(loaded.model.embed_image(img) == m.embed_image(img));
    // Saving the loaded model reproduces the file byte for byte.
    model::save_checkpoint(loaded.model, 7, dir / "again.ckpt");
    CHECK(read_file_bytes(dir / "m.ckpt") == read_file_bytes(dir / "again.ckpt"));
  }

  TEST_CASE("corrupted, truncated and wrong-version files are rejected") {
    const auto dir = testing::scratch_dir("ckpt_corrupt");
    model::save_checkpoint(model::VgsModel<float>(config(), 1), 1, dir / "good.ckpt");
    const auto bytes = read_file_bytes(dir / "good.ckpt");

    auto flipped = bytes;
    flipped[flipped.size() / 2] ^= 0x40;
    write_file_bytes(dir / "flipped.ckpt", flipped);
    CHECK_THROWS_AS(model::load_checkpoint(dir / "flipped.ckpt"), std::runtime_error);

    const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + static_cast<long>(bytes.size() - 9));
    write_file_bytes(dir / "truncated.ckpt", truncated);
    CHECK_THROWS_AS(model::load_checkpoint(dir / "truncated.ckpt"), std::runtime_error);

    auto versioned = bytes;
    versioned[8] = 2;
    write_file_bytes(dir / "v2.ckpt", versioned);
    try {
      model::load_checkpoint(dir / "v2.ckpt");
      FAIL("expected a version error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("version 2") != std::string::npos);
    }

    auto magic = bytes;
    magic[0] = 'X';
    write_file_bytes(dir / "magic.ckpt", magic);
    CHECK_THROWS_AS(model::load_checkpoint(dir / "magic.ckpt"), std::runtime_error);
    CHECK_THROWS_AS(model::load_checkpoint(dir / "missing.ckpt"), std::runtime_error);
  }
}
