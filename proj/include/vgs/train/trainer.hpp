#pragma once
// Training loop: shuffled in-batch negatives, bidirectional hinge loss,
// Adam driven by a cyclical learning rate evaluated per step, and a
// retrieval-based dev error after every epoch.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vgs/ad/adam.hpp"
#include "vgs/ad/schedule.hpp"
#include "vgs/dsp/features.hpp"
#include "vgs/model/encoders.hpp"

namespace vgs::train {

struct TrainingConfig {
  std::size_t epochs = 32;
  ad::LrSchedule schedule;
  double margin = 0.2;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  model::EncoderConfig encoder;
  ad::AdamConfig adam;

  void validate() const;
};

/// Captions paired with images. caption_image[i] indexes into images.
struct PairedDataset {
  std::vector<std::string> caption_ids;
  std::vector<dsp::AudioFeatures> captions;
  std::vector<std::size_t> caption_image;
  std::vector<std::string> image_ids;
  std::vector<std::vector<float>> images;

  std::size_t size() const { return captions.size(); }
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;  // mean summed hinge loss per batch
  double dev_error = 0.0;
  double lr_start = 0.0;
  double lr_end = 0.0;
  std::filesystem::path checkpoint;
};

/// 1-based epoch with the lowest dev error; ties go to the earliest.
std::size_t select_best_epoch(std::span<const EpochRecord> records);

/// Thrown when a batch produces a non-finite loss.
class NonFiniteLossError : public std::runtime_error {
 public:
  NonFiniteLossError(std::size_t epoch, std::vector<std::string> caption_ids);
  std::size_t epoch() const { return epoch_; }
  const std::vector<std::string>& caption_ids() const { return caption_ids_; }

 private:
  std::size_t epoch_;
  std::vector<std::string> caption_ids_;
};

struct TrainingResult {
  std::vector<EpochRecord> records;
  std::size_t best_epoch = 0;
  model::VgsModel<float> best_model;
};

struct TrainerOptions {
  /// Per-epoch checkpoints (epoch_NNN.ckpt) go here when set.
  std::optional<std::filesystem::path> checkpoint_dir;
  unsigned eval_threads = 1;
  std::function<void(const EpochRecord&)> on_epoch;
};

/// Runs one optimization step on the given batch and returns its loss.
double train_step(model::VgsModel<float>& model, ad::Adam<float>& optimizer, const PairedDataset& data,
                  std::span<const std::size_t> batch, float margin, double lr);

/// Dev error of a model on a held-out dataset.
double evaluate_dev_error(const model::VgsModel<float>& model, const PairedDataset& dev, unsigned threads = 1);

/// Trains from a fresh model initialized with config.seed. Captions and
/// images of `dev` must not appear in `train`.
TrainingResult train(const TrainingConfig& config, const PairedDataset& train, const PairedDataset& dev,
                     const TrainerOptions& options = {});

}  // namespace vgs::train
