#include "vgs/app/commands.hpp"

#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>

#include "vgs/app/csv.hpp"
#include "vgs/core/parallel.hpp"
#include "vgs/eval/retrieval.hpp"
#include "vgs/eval/stats.hpp"
#include "vgs/eval/sts.hpp"
#include "vgs/io/feature_store.hpp"
#include "vgs/io/image_features.hpp"
#include "vgs/io/manifest.hpp"
#include "vgs/io/sts_manifest.hpp"
#include "vgs/io/wav.hpp"
#include "vgs/model/checkpoint.hpp"
#include "vgs/model/inference.hpp"
#include "vgs/train/subsets.hpp"
#include "vgs/train/trainer.hpp"

namespace fs = std::filesystem;

namespace vgs::app {
namespace {

fs::path require_input(const std::string& value, const std::string& field) {
  if (value.empty()) throw std::invalid_argument("config field 'paths." + field + "': required by this command");
  fs::path path(value);
  if (!fs::exists(path)) throw std::runtime_error("missing prerequisite " + path.string() + " (paths." + field + ")");
  return path;
}

fs::path prepare_output(const RunConfig& config) {
  if (config.paths.out.empty()) throw std::invalid_argument("config field 'paths.out': required by this command");
  fs::path out(config.paths.out);
  fs::create_directories(out);
  write_run_config(out / "run_config.json", config);
  return out;
}

std::string optional_number(const std::optional<double>& value) {
  return value ? csv_number(*value) : std::string();
}

// Captions of one split with their images, features and image vectors
// loaded. Images are ordered by first appearance.
train::PairedDataset load_split(const io::DatasetManifest& manifest, io::Split split, const io::FeatureStore& store,
                                const io::ImageFeaturePack& pack) {
  train::PairedDataset data;
  std::map<std::string, std::size_t> image_index;
  for (const auto& record : manifest.records_in(split)) {
    if (!store.contains(record.caption_id)) {
      throw std::runtime_error("caption " + record.caption_id + " has no features in " +
                               store.directory().string());
    }
    auto [it, inserted] = image_index.try_emplace(record.image_id, data.image_ids.size());
    if (inserted) {
      data.image_ids.push_back(record.image_id);
      data.images.push_back(pack.load(record.image_id).values);
    }
    data.caption_ids.push_back(record.caption_id);
    data.captions.push_back(store.load(record.caption_id));
    data.caption_image.push_back(it->second);
  }
  return data;
}

void check_image_dim(const model::EncoderConfig& encoder, const io::ImageFeaturePack& pack) {
  if (encoder.image_dim != pack.dim()) {
    throw std::invalid_argument("config field 'encoder.image_dim': " + std::to_string(encoder.image_dim) +
                                " does not match the image pack dimension " + std::to_string(pack.dim()));
  }
}

}  // namespace

int cmd_extract_features(const RunConfig& config, std::ostream& log) {
  config.validate();
  const fs::path manifest_path = require_input(config.paths.manifest, "manifest");
  const auto manifest = io::load_manifest(manifest_path, io::SplitSpec::named(config.split_spec));
  const fs::path out = prepare_output(config);

  const dsp::MfccExtractor extractor(config.features);
  const auto& records = manifest.records;
  std::vector<std::optional<std::size_t>> frames(records.size());
  std::vector<std::string> errors(records.size());
  std::mutex log_mutex;
  std::size_t done = 0;
  parallel_for(records.size(), config.threads, [&](std::size_t i) {
    try {
      const auto wav = io::read_wav(manifest.audio_path(records[i]), config.features.sample_rate);
      const auto features = extractor.extract(wav);
      io::write_feature_file(out / io::feature_file_name(records[i].caption_id), features);
      frames[i] = features.num_frames();
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    std::lock_guard lock(log_mutex);
    ++done;
    if (done % 100 == 0 || done == records.size()) log << "extract-features: " << done << "/" << records.size() << "\n";
  });

  std::vector<io::FeatureIndexEntry> entries;
  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (frames[i]) {
      entries.push_back({records[i].caption_id, io::feature_file_name(records[i].caption_id), *frames[i]});
    } else {
      failed.push_back(i);
    }
  }
  io::write_feature_index(out, entries);
  log << "extract-features: wrote " << entries.size() << " entries to " << out.string() << "\n";
  if (failed.empty()) return kExitOk;
  log << "extract-features: " << failed.size() << " of " << records.size() << " utterances failed:\n";
  for (std::size_t i : failed) log << "  " << records[i].caption_id << ": " << errors[i] << "\n";
  return kExitPartial;
}

int cmd_train(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto manifest =
      io::load_manifest(require_input(config.paths.manifest, "manifest"), io::SplitSpec::named(config.split_spec));
  const auto store = io::FeatureStore::open(require_input(config.paths.features, "features"));
  const auto pack = io::ImageFeaturePack::open(require_input(config.paths.images, "images"));
  check_image_dim(config.encoder, pack);
  const fs::path out = prepare_output(config);

  const auto train_set = load_split(manifest, io::Split::kTrain, store, pack);
  const auto dev_set = load_split(manifest, io::Split::kDev, store, pack);
  if (dev_set.size() == 0) throw std::runtime_error(config.paths.manifest + ": the dev split is empty");

  train::TrainingConfig tc;
  tc.epochs = config.training.epochs;
  tc.schedule = config.training.schedule;
  tc.margin = config.training.margin;
  tc.batch_size = config.training.batch_size;
  tc.seed = config.seed;
  tc.encoder = config.encoder;
  tc.adam = config.training.adam;

  train::TrainerOptions options;
  options.checkpoint_dir = out / "checkpoints";
  fs::create_directories(*options.checkpoint_dir);
  options.eval_threads = config.threads;
  options.on_epoch = [&](const train::EpochRecord& r) {
    char line[160];
    std::snprintf(line, sizeof(line), "train: epoch %zu loss %.6f dev_error %.6f lr %.3g..%.3g\n", r.epoch,
                  r.train_loss, r.dev_error, r.lr_start, r.lr_end);
    log << line << std::flush;
  };
  log << "train: " << train_set.size() << " training captions, " << dev_set.size() << " dev captions\n";
  const auto result = train::train(tc, train_set, dev_set, options);

  CsvWriter csv({"epoch", "train_loss", "dev_error", "lr_start", "lr_end", "checkpoint"});
  for (const auto& r : result.records) {
    csv.row({std::to_string(r.epoch), csv_number(r.train_loss), csv_number(r.dev_error), csv_number(r.lr_start),
             csv_number(r.lr_end), fs::relative(r.checkpoint, out).generic_string()});
  }
  csv.save(out / "epochs.csv");
  model::save_checkpoint(result.best_model, static_cast<std::uint32_t>(result.best_epoch), out / "best.ckpt");
  log << "train: best epoch " << result.best_epoch << " saved to " << (out / "best.ckpt").string() << "\n";
  return kExitOk;
}

int cmd_make_subsets(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto manifest =
      io::load_manifest(require_input(config.paths.manifest, "manifest"), io::SplitSpec::named(config.split_spec));
  std::vector<train::SubsetSpec> specs;
  for (std::size_t c : config.subsets.captions_per_image) specs.push_back({config.subsets.total_captions, c});
  const auto subsets = train::make_paraphrase_subsets(manifest, specs);
  const fs::path out = prepare_output(config);

  // Written manifests live elsewhere, so audio paths are stored resolved.
  auto resolved = [&](std::vector<io::ManifestRecord> records) {
    for (auto& r : records) r.audio_path = fs::absolute(manifest.audio_path(r)).lexically_normal().string();
    return records;
  };
  const auto held_out = [&] {
    auto dev = resolved(manifest.records_in(io::Split::kDev));
    const auto test = resolved(manifest.records_in(io::Split::kTest));
    dev.insert(dev.end(), test.begin(), test.end());
    return dev;
  }();

  CsvWriter csv({"captions_per_image", "images", "captions", "file"});
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto records = resolved(subsets[i]);
    std::set<std::string> images;
    for (const auto& r : records) images.insert(r.image_id);
    const std::size_t captions = records.size();
    records.insert(records.end(), held_out.begin(), held_out.end());
    const std::string file = "subset_c" + std::to_string(specs[i].captions_per_image) + ".tsv";
    io::write_manifest(out / file, records);
    csv.row({std::to_string(specs[i].captions_per_image), std::to_string(images.size()), std::to_string(captions),
             file});
    log << "make-subsets: " << file << ": " << images.size() << " images, " << captions << " captions\n";
  }
  csv.save(out / "subsets.csv");
  return kExitOk;
}

int cmd_eval_retrieval(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto manifest =
      io::load_manifest(require_input(config.paths.manifest, "manifest"), io::SplitSpec::named(config.split_spec));
  const auto store = io::FeatureStore::open(require_input(config.paths.features, "features"));
  const auto pack = io::ImageFeaturePack::open(require_input(config.paths.images, "images"));
  const auto checkpoint = model::load_checkpoint(require_input(config.paths.checkpoint, "checkpoint"));
  check_image_dim(checkpoint.model.config(), pack);
  const fs::path out = prepare_output(config);

  const auto data = load_split(manifest, io::parse_split(config.eval_split), store, pack);
  if (data.size() == 0) throw std::runtime_error("split '" + config.eval_split + "' of the manifest is empty");
  const auto captions = model::embed_captions(checkpoint.model, data.captions, config.threads);
  const auto images = model::embed_images(checkpoint.model, data.images, config.threads);
  const auto result = eval::retrieval_eval(captions, images, std::span<const std::size_t>(data.caption_image));

  CsvWriter csv({"direction", "r1", "r5", "r10", "median_rank", "queries"});
  for (const auto* report : {&result.caption_to_image, &result.image_to_caption}) {
    csv.row({eval::to_string(report->direction), csv_number(report->r1), csv_number(report->r5),
             csv_number(report->r10), std::to_string(report->median_rank), std::to_string(report->queries)});
    char line[160];
    std::snprintf(line, sizeof(line), "eval-retrieval: %s R@1 %.1f R@5 %.1f R@10 %.1f med_r %zu\n",
                  eval::to_string(report->direction).c_str(), report->r1, report->r5, report->r10,
                  report->median_rank);
    log << line;
  }
  csv.save(out / "retrieval.csv");
  return kExitOk;
}

int cmd_eval_sts(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto manifest = io::load_sts_manifest(require_input(config.paths.sts_manifest, "sts_manifest"));
  const fs::path checkpoint_path = require_input(config.paths.checkpoint, "checkpoint");
  const auto checkpoint = model::load_checkpoint(checkpoint_path);
  const fs::path out = prepare_output(config);
  const std::string model_name = config.model_name.empty() ? checkpoint_path.stem().string() : config.model_name;

  const auto report = eval::sts_eval(checkpoint.model, manifest, config.features, config.threads);
  for (const auto& w : report.warnings) log << "eval-sts: warning: " << w << "\n";
  if (report.skipped_pairs > 0) log << "eval-sts: skipped " << report.skipped_pairs << " pairs\n";

  CsvWriter subtasks({"subtask", "n", "r", "ci_lo", "ci_hi"});
  CsvWriter long_table({"subtask", "model", "r", "ci_lo", "ci_hi", "n"});
  auto emit = [&](const eval::SubtaskCorrelation& c) {
    const std::string lo = c.ci ? csv_number(c.ci->lo) : "";
    const std::string hi = c.ci ? csv_number(c.ci->hi) : "";
    subtasks.row({c.subtask, std::to_string(c.n), optional_number(c.r), lo, hi});
    long_table.row({c.subtask, model_name, optional_number(c.r), lo, hi, std::to_string(c.n)});
  };
  for (const auto& c : report.subtasks) emit(c);
  emit(report.overall);
  subtasks.save(out / "sts_subtasks.csv");
  long_table.save(out / "sts_long.csv");

  CsvWriter pairs({"pair_id", "subtask", "human_score", "similarity", "terms"});
  for (const auto& p : report.pairs) {
    pairs.row({p.pair_id, p.subtask, csv_number(p.human_score), csv_number(p.similarity), std::to_string(p.terms)});
  }
  pairs.save(out / "sts_pairs.csv");
  log << "eval-sts: " << report.pairs.size() << " pairs, overall r "
      << (report.overall.r ? csv_number(*report.overall.r) : std::string("n/a")) << "\n";
  return kExitOk;
}

int cmd_compare_aic(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.inputs.size() < 2) throw std::invalid_argument("config field 'inputs': at least two models are needed");
  struct Series {
    std::string name;
    std::vector<std::string> ids;
    std::map<std::string, std::pair<double, double>> values;  // pair id -> (human, similarity)
  };
  std::vector<Series> series;
  for (const auto& input : config.inputs) {
    const fs::path path = require_input(input.path, "inputs[].path");
    const auto rows = read_csv(path);
    if (rows.empty()) throw std::runtime_error(path.string() + ": empty file");
    auto column = [&](const std::string& name) {
      for (std::size_t i = 0; i < rows[0].size(); ++i) {
        if (rows[0][i] == name) return i;
      }
      throw std::runtime_error(path.string() + ": missing column '" + name + "'");
    };
    const std::size_t id_col = column("pair_id"), human_col = column("human_score"), sim_col = column("similarity");
    Series s;
    s.name = input.name.empty() ? fs::absolute(path).parent_path().filename().string() : input.name;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != rows[0].size()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(r + 1) + ": wrong number of fields");
      }
      try {
        const double human = std::stod(row[human_col]);
        const double sim = std::stod(row[sim_col]);
        if (!s.values.emplace(row[id_col], std::make_pair(human, sim)).second) {
          throw std::runtime_error("duplicate pair id " + row[id_col]);
        }
      } catch (const std::logic_error&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(r + 1) + ": malformed number");
      }
      s.ids.push_back(row[id_col]);
    }
    series.push_back(std::move(s));
  }

  // Every model must be scored on the same pairs with the same human ratings.
  const auto& ref = series.front();
  std::vector<double> human;
  for (const auto& id : ref.ids) human.push_back(ref.values.at(id).first);
  std::vector<eval::AicRow> rows;
  std::set<std::string> names;
  for (const auto& s : series) {
    if (!names.insert(s.name).second) throw std::invalid_argument("config field 'inputs': duplicate model " + s.name);
    if (s.values.size() != ref.values.size()) {
      throw std::runtime_error("model " + s.name + " has " + std::to_string(s.values.size()) + " pairs, model " +
                               ref.name + " has " + std::to_string(ref.values.size()));
    }
    std::vector<double> sims;
    for (std::size_t i = 0; i < ref.ids.size(); ++i) {
      const auto it = s.values.find(ref.ids[i]);
      if (it == s.values.end()) throw std::runtime_error("model " + s.name + " lacks pair " + ref.ids[i]);
      if (it->second.first != human[i]) {
        throw std::runtime_error("model " + s.name + " disagrees on the human score of pair " + ref.ids[i]);
      }
      sims.push_back(it->second.second);
    }
    const auto fit = eval::aic_regression(human, sims);
    rows.push_back({s.name, fit.aic, 0.0, fit.log_likelihood, fit.n});
  }
  rows = eval::compare_aic(std::move(rows));
  const fs::path out = prepare_output(config);

  CsvWriter csv({"model", "aic", "delta_aic", "log_likelihood", "n"});
  for (const auto& r : rows) {
    csv.row({r.model, csv_number(r.aic), csv_number(r.delta_aic), csv_number(r.log_likelihood), std::to_string(r.n)});
    char line[200];
    std::snprintf(line, sizeof(line), "compare-aic: %-20s AIC %.2f dAIC %.2f LL %.2f\n", r.model.c_str(), r.aic,
                  r.delta_aic, r.log_likelihood);
    log << line;
  }
  csv.save(out / "aic.csv");
  return kExitOk;
}

int run_command(const RunConfig& config, std::ostream& log) {
  const std::string& c = config.command;
  if (c == "extract-features") return cmd_extract_features(config, log);
  if (c == "train") return cmd_train(config, log);
  if (c == "make-subsets") return cmd_make_subsets(config, log);
  if (c == "eval-retrieval") return cmd_eval_retrieval(config, log);
  if (c == "eval-sts") return cmd_eval_sts(config, log);
  if (c == "compare-aic") return cmd_compare_aic(config, log);
  throw std::invalid_argument("config field 'command': unknown command '" + c + "'");
}

}  // namespace vgs::app
