#include "vgs/train/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "vgs/ad/ops.hpp"
#include "vgs/eval/retrieval.hpp"
#include "vgs/model/checkpoint.hpp"
#include "vgs/model/inference.hpp"
#include "vgs/train/batches.hpp"

namespace vgs::train {

void TrainingConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("training config: epochs must be >= 1");
  if (batch_size < 2) throw std::invalid_argument("training config: batch_size must be >= 2 (one negative needed)");
  if (!(margin >= 0.0)) throw std::invalid_argument("training config: margin must be >= 0");
  schedule.validate();
  encoder.validate();
}

void PairedDataset::validate() const {
  if (caption_ids.size() != captions.size() || caption_image.size() != captions.size()) {
    throw std::invalid_argument("paired dataset: caption arrays differ in length");
  }
  if (image_ids.size() != images.size()) throw std::invalid_argument("paired dataset: image arrays differ in length");
  for (std::size_t i = 0; i < caption_image.size(); ++i) {
    if (caption_image[i] >= images.size()) {
      throw std::invalid_argument("paired dataset: caption " + caption_ids[i] + " references a missing image");
    }
  }
}

std::size_t select_best_epoch(std::span<const EpochRecord> records) {
  if (records.empty()) throw std::invalid_argument("select_best_epoch: no epoch records");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].dev_error < records[best].dev_error) best = i;
  }
  return records[best].epoch;
}

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

}  // namespace

NonFiniteLossError::NonFiniteLossError(std::size_t epoch, std::vector<std::string> caption_ids)
    : std::runtime_error("non-finite loss in epoch " + std::to_string(epoch) + "; batch captions: " +
                         join_ids(caption_ids)),
      epoch_(epoch),
      caption_ids_(std::move(caption_ids)) {}

double train_step(model::VgsModel<float>& model, ad::Adam<float>& optimizer, const PairedDataset& data,
                  std::span<const std::size_t> batch, float margin, double lr) {
  optimizer.zero_grad();
  std::vector<ad::Var<float>> captions, images;
  captions.reserve(batch.size());
  images.reserve(batch.size());
  for (std::size_t idx : batch) {
    captions.push_back(model.encode_caption(data.captions[idx]));
    images.push_back(model.encode_image(std::span<const float>(data.images[data.caption_image[idx]])));
  }
  auto sims = ad::matmul_nt(ad::stack_rows(captions), ad::stack_rows(images));
  auto loss = ad::batch_hinge_loss(sims, margin);
  const double value = loss->values()[0];
  if (!std::isfinite(value)) return value;
  ad::backward(loss);
  optimizer.step(lr);
  return value;
}

double evaluate_dev_error(const model::VgsModel<float>& model, const PairedDataset& dev, unsigned threads) {
  const auto captions = model::embed_captions(model, dev.captions, threads);
  const auto images = model::embed_images(model, dev.images, threads);
  return eval::dev_error(eval::retrieval_eval(captions, images, std::span<const std::size_t>(dev.caption_image)));
}

TrainingResult train(const TrainingConfig& config, const PairedDataset& train_set, const PairedDataset& dev,
                     const TrainerOptions& options) {
  config.validate();
  train_set.validate();
  dev.validate();
  {
    const std::set<std::string> train_captions(train_set.caption_ids.begin(), train_set.caption_ids.end());
    const std::set<std::string> train_images(train_set.image_ids.begin(), train_set.image_ids.end());
    for (const auto& id : dev.caption_ids) {
      if (train_captions.contains(id)) throw std::invalid_argument("dev caption " + id + " also appears in training data");
    }
    for (const auto& id : dev.image_ids) {
      if (train_images.contains(id)) throw std::invalid_argument("dev image " + id + " also appears in training data");
    }
  }

  model::VgsModel<float> model(config.encoder, config.seed);
  ad::Adam<float> optimizer(model.parameter_vars(), config.adam);
  const std::size_t steps_per_epoch = train_set.size() / config.batch_size;
  if (steps_per_epoch == 0) {
    throw std::invalid_argument("training set of " + std::to_string(train_set.size()) +
                                " captions cannot fill one batch of " + std::to_string(config.batch_size));
  }

  TrainingResult result{{}, 0, model::VgsModel<float>(config.encoder, config.seed)};
  std::size_t global_step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = make_batches(train_set.size(), config.batch_size, config.seed, epoch);
    EpochRecord record;
    record.epoch = epoch;
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const double lr = ad::lr_at(config.schedule, static_cast<double>(global_step) / steps_per_epoch);
      if (b == 0) record.lr_start = lr;
      record.lr_end = lr;
      const double loss = train_step(model, optimizer, train_set, batches[b], static_cast<float>(config.margin), lr);
      if (!std::isfinite(loss)) {
        std::vector<std::string> ids;
        for (std::size_t idx : batches[b]) ids.push_back(train_set.caption_ids[idx]);
        throw NonFiniteLossError(epoch, std::move(ids));
      }
      loss_sum += loss;
      ++global_step;
    }
    record.train_loss = loss_sum / static_cast<double>(batches.size());
    record.dev_error = evaluate_dev_error(model, dev, options.eval_threads);
    if (options.checkpoint_dir) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%03zu.ckpt", epoch);
      record.checkpoint = *options.checkpoint_dir / name;
      model::save_checkpoint(model, static_cast<std::uint32_t>(epoch), record.checkpoint);
    }
    const bool improved = result.records.empty() || record.dev_error < result.records[result.best_epoch - 1].dev_error;
    result.records.push_back(record);
    if (improved) {
      result.best_epoch = epoch;
      result.best_model.copy_values_from(model);
    }
    if (options.on_epoch) options.on_epoch(record);
  }
  return result;
}

}  // namespace vgs::train
