#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <limits>
#include <set>

#include "support/synthetic.hpp"
#include "vgs/eval/retrieval.hpp"
#include "vgs/model/checkpoint.hpp"
#include "vgs/model/inference.hpp"
#include "vgs/train/batches.hpp"
#include "vgs/train/subsets.hpp"
#include "vgs/train/trainer.hpp"

using namespace vgs;

namespace {

train::TrainingConfig tiny_training(std::size_t epochs, std::size_t batch) {
  train::TrainingConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = batch;
  cfg.seed = 5;
  cfg.encoder.conv_channels = 8;
  cfg.encoder.lstm_hidden = 8;
  cfg.encoder.attention_hidden = 8;
  cfg.encoder.embed_dim = 16;
  cfg.encoder.image_dim = 12;
  cfg.schedule.lr_max = 5e-3;
  cfg.schedule.lr_min = 5e-5;
  return cfg;
}

io::DatasetManifest scaled_source(std::size_t images, std::size_t captions_per_image) {
  io::DatasetManifest m;
  for (std::size_t i = 0; i < images; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "im%05zu", i);
    for (std::size_t c = 0; c < captions_per_image; ++c) {
      m.records.push_back({std::string(id) + "#" + std::to_string(c), id, "a.wav", io::Split::kTrain, 0});
    }
  }
  return m;
}

void check_nesting(const std::vector<std::vector<io::ManifestRecord>>& subsets,
                   const std::vector<train::SubsetSpec>& specs) {
  for (std::size_t a = 0; a < specs.size(); ++a) {
    CHECK(subsets[a].size() == specs[a].total_captions);
    std::map<std::string, std::vector<std::string>> per_image_a;
    for (const auto& r : subsets[a]) per_image_a[r.image_id].push_back(r.caption_id);
    CHECK(per_image_a.size() == specs[a].image_count());
    for (const auto& [img, caps] : per_image_a) CHECK(caps.size() == specs[a].captions_per_image);
    for (std::size_t b = 0; b < specs.size(); ++b) {
      if (specs[a].captions_per_image <= specs[b].captions_per_image) continue;
      // a has more captions per image, hence fewer images: its images are a subset of b's.
      std::map<std::string, std::vector<std::string>> per_image_b;
      for (const auto& r : subsets[b]) per_image_b[r.image_id].push_back(r.caption_id);
      for (const auto& [img, caps_a] : per_image_a) {
        REQUIRE(per_image_b.contains(img));
        const auto& caps_b = per_image_b[img];
        REQUIRE(caps_b.size() <= caps_a.size());
        CHECK(std::equal(caps_b.begin(), caps_b.end(), caps_a.begin()));
      }
    }
  }
}

}  // namespace

TEST_SUITE("training") {
  TEST_CASE("batches") {
    const auto b = train::make_batches(100, 32, 1, 1);
    CHECK(b.size() == 3);
    std::set<std::size_t> seen;
    for (const auto& batch : b) {
      CHECK(batch.size() == 32);
      for (auto i : batch) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == 96);
    CHECK(train::make_batches(100, 32, 1, 1) == b);
    CHECK(train::make_batches(100, 32, 1, 2) != b);
    CHECK(train::make_batches(100, 32, 2, 1) != b);
    const auto exact = train::make_batches(64, 32, 9, 3);
    std::set<std::size_t> all;
    for (const auto& batch : exact) all.insert(batch.begin(), batch.end());
    CHECK(all.size() == 64);
    CHECK_THROWS_AS(train::make_batches(31, 32, 1, 1), std::invalid_argument);
  }

  TEST_CASE("best epoch selection") {
    auto records = [](std::vector<double> errors) {
      std::vector<train::EpochRecord> r;
      for (std::size_t i = 0; i < errors.size(); ++i) r.push_back({i + 1, 0.0, errors[i], 0, 0, {}});
      return r;
    };
    CHECK(train::select_best_epoch(records({0.9, 0.4, 0.6})) == 2);
    CHECK(train::select_best_epoch(records({0.5, 0.5, 0.5})) == 1);
    CHECK_THROWS_AS(train::select_best_epoch(records({})), std::invalid_argument);
    Rng rng(4);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> e(1 + rng.below(40));
      for (auto& x : e) x = static_cast<double>(rng.below(10)) / 10.0;
      std::size_t best = 0;
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i] < e[best]) best = i;
      CHECK(train::select_best_epoch(records(e)) == best + 1);
    }
  }

  TEST_CASE("training config validation") {
    train::TrainingConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.epochs == 32);
    cfg.batch_size = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }

  TEST_CASE("paraphrase subsets at full size") {
    const auto specs = train::paraphrase_specs();
    REQUIRE(specs.size() == 5);
    const auto subsets = train::make_paraphrase_subsets(scaled_source(30000, 5), specs);
    const std::vector<std::size_t> expected{6000, 7500, 10000, 15000, 30000};
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(specs[i].image_count() == expected[i]);
      std::set<std::string> images;
      for (const auto& r : subsets[i]) images.insert(r.image_id);
      CHECK(images.size() == expected[i]);
      CHECK(subsets[i].size() == 30000);
    }
  }

  TEST_CASE("paraphrase subsets nest on scaled-down sources") {
    const std::vector<train::SubsetSpec> two{{50, 5}, {50, 1}};
    check_nesting(train::make_paraphrase_subsets(scaled_source(100, 5), two), two);
    const auto five = train::paraphrase_specs(120);
    check_nesting(train::make_paraphrase_subsets(scaled_source(200, 5), five), five);
    // Only train records are drawn; a short source is rejected with counts.
    auto mixed = scaled_source(100, 5);
    for (std::size_t i = 0; i < 300; ++i) mixed.records[i].split = io::Split::kDev;
    try {
      train::make_paraphrase_subsets(mixed, two);
      FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("need 50") != std::string::npos);
    }
    CHECK_THROWS_AS(train::SubsetSpec({50, 3}).validate(), std::invalid_argument);
  }

  TEST_CASE("a tiny run records every epoch, snapshots each one and is reproducible") {
    const auto dir = testing::scratch_dir("train_tiny");
    Rng rng(3);
    const auto cfg = tiny_training(32, 4);
    const auto data = testing::random_pairs(8, 9, cfg.encoder.image_dim, rng, "t");
    const auto dev = testing::noisy_copy(data, 0.1, rng, "dev_");
    train::TrainerOptions opts;
    opts.checkpoint_dir = dir;
    std::size_t callbacks = 0;
    opts.on_epoch = [&](const train::EpochRecord&) { ++callbacks; };
    const auto result = train::train(cfg, data, dev, opts);
    CHECK(result.records.size() == 32);
    CHECK(callbacks == 32);
    for (const auto& r : result.records) {
      CHECK(r.dev_error >= 0.0);
      CHECK(r.dev_error <= 1.0);
      CHECK(r.lr_start >= cfg.schedule.lr_min);
      CHECK(r.lr_end <= cfg.schedule.lr_max);
      const auto ck = model::load_checkpoint(r.checkpoint);
      CHECK(ck.epoch == r.epoch);
    }
    CHECK(result.records.back().train_loss < result.records.front().train_loss);
    CHECK(result.best_epoch == train::select_best_epoch(result.records));
    const auto best = model::load_checkpoint(result.records[result.best_epoch - 1].checkpoint);
    CHECK(best.model.embed_caption(data.captions[0]) == result.best_model.embed_caption(data.captions[0]));

    const auto again = train::train(cfg, data, dev);
    for (std::size_t i = 0; i < 32; ++i) {
      CHECK(again.records[i].train_loss == result.records[i].train_loss);
      CHECK(again.records[i].dev_error == result.records[i].dev_error);
    }
  }

  TEST_CASE("dev items may not appear in training data") {
    Rng rng(3);
    const auto cfg = tiny_training(1, 4);
    const auto data = testing::random_pairs(8, 9, cfg.encoder.image_dim, rng, "t");
    CHECK_THROWS_AS(train::train(cfg, data, data), std::invalid_argument);
    auto dev = testing::noisy_copy(data, 0.1, rng, "dev_");
    dev.image_ids[2] = data.image_ids[5];
    CHECK_THROWS_AS(train::train(cfg, data, dev), std::invalid_argument);
    const auto small = testing::random_pairs(3, 9, cfg.encoder.image_dim, rng, "s");
    CHECK_THROWS_AS(train::train(cfg, small, testing::noisy_copy(small, 0.1, rng, "d")), std::invalid_argument);
  }

  TEST_CASE("a non-finite loss aborts with the batch ids") {
    Rng rng(3);
    const auto cfg = tiny_training(1, 4);
    auto data = testing::random_pairs(4, 9, cfg.encoder.image_dim, rng, "t");
    const auto dev = testing::noisy_copy(data, 0.1, rng, "dev_");
    std::vector<float> big(data.captions[1].frames.storage());
    big[7] = std::numeric_limits<float>::quiet_NaN();
    data.captions[1].frames = Matrix<float>(data.captions[1].frames.rows(), 39, big);
    try {
      train::train(cfg, data, dev);
      FAIL("expected a non-finite loss");
    } catch (const train::NonFiniteLossError& e) {
      CHECK(e.epoch() == 1);
      CHECK(e.caption_ids().size() == 4);
      CHECK(std::string(e.what()).find("tc1") != std::string::npos);
    }
  }
}
