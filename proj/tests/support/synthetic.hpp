#pragma once
// Deterministic synthetic data: speech-like waveforms, toy caption corpora
// on disk and toy spoken-STS manifests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "vgs/core/matrix.hpp"
#include "vgs/core/random.hpp"
#include "vgs/dsp/features.hpp"
#include "vgs/io/image_features.hpp"
#include "vgs/io/manifest.hpp"
#include "vgs/io/sts_manifest.hpp"
#include "vgs/io/wav.hpp"
#include "vgs/train/trainer.hpp"

namespace testing {

namespace fs = std::filesystem;

inline std::vector<double> random_values(std::size_t n, vgs::Rng& rng, double scale = 1.0) {
  std::vector<double> out(n);
  for (auto& v : out) v = scale * rng.normal();
  return out;
}

template <typename T>
vgs::Matrix<T> random_matrix(std::size_t rows, std::size_t cols, vgs::Rng& rng, double scale = 1.0) {
  std::vector<T> data(rows * cols);
  for (auto& v : data) v = static_cast<T>(scale * rng.normal());
  return vgs::Matrix<T>(rows, cols, std::move(data));
}

inline vgs::dsp::AudioFeatures random_features(std::size_t frames, vgs::Rng& rng) {
  vgs::dsp::AudioFeatures f;
  f.frames = random_matrix<float>(frames, vgs::dsp::kFeatureWidth, rng);
  return f;
}

// n one-caption images with random features and image vectors; ids carry
// `prefix` so separate sets stay disjoint.
inline vgs::train::PairedDataset random_pairs(std::size_t n, std::size_t frames, std::size_t image_dim,
                                              vgs::Rng& rng, const std::string& prefix) {
  vgs::train::PairedDataset d;
  for (std::size_t i = 0; i < n; ++i) {
    d.caption_ids.push_back(prefix + "c" + std::to_string(i));
    d.image_ids.push_back(prefix + "i" + std::to_string(i));
    d.captions.push_back(random_features(frames, rng));
    std::vector<float> img(image_dim);
    for (auto& v : img) v = static_cast<float>(rng.normal());
    d.images.push_back(img);
    d.caption_image.push_back(i);
  }
  return d;
}

// The same pairs under new ids with Gaussian noise added to every value.
inline vgs::train::PairedDataset noisy_copy(const vgs::train::PairedDataset& src, double sigma, vgs::Rng& rng,
                                            const std::string& prefix) {
  vgs::train::PairedDataset d = src;
  for (auto& id : d.caption_ids) id = prefix + id;
  for (auto& id : d.image_ids) id = prefix + id;
  for (auto& c : d.captions) {
    std::vector<float> v(c.frames.storage());
    for (auto& x : v) x += static_cast<float>(sigma * rng.normal());
    c.frames = vgs::Matrix<float>(c.frames.rows(), c.frames.cols(), std::move(v));
  }
  for (auto& img : d.images)
    for (auto& x : img) x += static_cast<float>(sigma * rng.normal());
  return d;
}

// A sequence of 60 ms "phones", each two damped formant-like partials over a
// voiced pitch. `phones` fixes the content; `voice` shifts pitch and timbre.
inline vgs::dsp::Waveform speech_like(const std::vector<int>& phones, std::uint64_t voice, int rate = 16000,
                                      double noise = 0.01) {
  vgs::Rng rng(vgs::derive_seed(0x766f696365ULL, voice));
  const double pitch = 90.0 + 15.0 * static_cast<double>(voice % 8);
  const double tilt = 0.8 + 0.05 * static_cast<double>(voice % 5);
  const std::size_t seg = static_cast<std::size_t>(0.06 * rate);
  vgs::dsp::Waveform wav;
  wav.sample_rate = rate;
  wav.samples.resize(seg * phones.size() + static_cast<std::size_t>(0.05 * rate));
  for (std::size_t p = 0; p < phones.size(); ++p) {
    const double f1 = 300.0 + 90.0 * (phones[p] % 7);
    const double f2 = 900.0 + 210.0 * (phones[p] % 11);
    for (std::size_t n = 0; n < seg; ++n) {
      const double t = static_cast<double>(n) / rate;
      const double env = std::sin(std::numbers::pi * static_cast<double>(n) / static_cast<double>(seg));
      const double source = std::sin(2 * std::numbers::pi * pitch * t);
      const double v = env * (0.3 * std::sin(2 * std::numbers::pi * f1 * t) * (1.0 + 0.3 * source) +
                              0.2 * tilt * std::sin(2 * std::numbers::pi * f2 * t));
      wav.samples[p * seg + n] = static_cast<float>(v);
    }
  }
  for (auto& s : wav.samples) s += static_cast<float>(noise * rng.normal());
  return wav;
}

inline std::vector<int> random_phones(std::size_t count, vgs::Rng& rng) {
  std::vector<int> out(count);
  for (auto& p : out) p = static_cast<int>(rng.below(40));
  return out;
}

struct ToyCorpus {
  fs::path dir;
  fs::path manifest;
  fs::path images;
  std::size_t image_dim = 0;
  std::size_t captions = 0;
};

// Images are noisy copies of per-image prototypes; each image's captions say
// the same phone sequence in different voices. Splits take images in order.
inline ToyCorpus write_toy_corpus(const fs::path& dir, std::size_t train_images, std::size_t dev_images,
                                  std::size_t test_images, std::size_t captions_per_image, std::size_t image_dim,
                                  std::uint64_t seed) {
  fs::create_directories(dir / "audio");
  vgs::Rng rng(seed);
  ToyCorpus corpus{dir, dir / "manifest.tsv", dir / "images.pack", image_dim, 0};
  std::vector<vgs::io::ManifestRecord> records;
  std::vector<vgs::io::ImageFeatureEntry> images;
  const std::size_t total = train_images + dev_images + test_images;
  for (std::size_t i = 0; i < total; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "img%04zu", i);
    const auto split = i < train_images ? vgs::io::Split::kTrain
                       : i < train_images + dev_images ? vgs::io::Split::kDev
                                                       : vgs::io::Split::kTest;
    vgs::io::ImageFeatureEntry entry{id, std::vector<float>(image_dim)};
    for (auto& v : entry.values) v = static_cast<float>(std::abs(rng.normal()));
    images.push_back(entry);
    const auto phones = random_phones(6, rng);
    for (std::size_t c = 0; c < captions_per_image; ++c) {
      const std::string caption = std::string(id) + "_" + std::to_string(c);
      const std::string file = "audio/" + caption + ".wav";
      vgs::io::write_wav(dir / file, speech_like(phones, c));
      records.push_back({caption, id, file, split, 0});
      ++corpus.captions;
    }
  }
  vgs::io::write_manifest(corpus.manifest, records);
  vgs::io::write_image_feature_pack(corpus.images, image_dim, images);
  return corpus;
}

// Sentence b keeps a share of sentence a's phones that grows with the human
// score, so similarity has something to track.
inline vgs::io::StsManifest write_toy_sts(const fs::path& dir, std::size_t voices, std::size_t pairs_per_subtask,
                                          std::uint64_t seed) {
  fs::create_directories(dir / "audio");
  vgs::Rng rng(seed);
  vgs::io::StsManifest manifest;
  manifest.base_dir = dir;
  for (std::size_t v = 0; v < voices; ++v) manifest.voices.push_back("v" + std::to_string(v));
  std::size_t next_id = 0;
  for (const auto& subtask : vgs::io::sts_inventory()) {
    for (std::size_t k = 0; k < pairs_per_subtask; ++k) {
      vgs::io::StsPair pair;
      pair.pair_id = "p" + std::to_string(next_id++);
      pair.subtask = subtask.label();
      pair.human_score = std::round(rng.uniform(0.0, 5.0) * 10.0) / 10.0;
      const auto a = random_phones(6, rng);
      auto b = a;
      for (auto& p : b) {
        if (rng.uniform() * 5.0 > pair.human_score) p = static_cast<int>(rng.below(40));
      }
      pair.sentence_a = "sentence " + pair.pair_id + "a";
      pair.sentence_b = "sentence " + pair.pair_id + "b";
      for (std::size_t v = 0; v < voices; ++v) {
        const std::string fa = "audio/" + pair.pair_id + "_a_v" + std::to_string(v) + ".wav";
        const std::string fb = "audio/" + pair.pair_id + "_b_v" + std::to_string(v) + ".wav";
        vgs::io::write_wav(dir / fa, speech_like(a, v));
        vgs::io::write_wav(dir / fb, speech_like(b, v));
        pair.utterances_a.push_back(fa);
        pair.utterances_b.push_back(fb);
      }
      manifest.pairs.push_back(pair);
    }
  }
  vgs::io::write_sts_manifest(dir / "sts.tsv", manifest);
  return manifest;
}

// A fresh, empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vgs_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace testing
