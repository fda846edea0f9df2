// vgs: command-line front end. Settings merge as defaults < --config file
// < flags; the merged result is written to <out>/run_config.json.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vgs/app/commands.hpp"
#include "vgs/app/run_config.hpp"
#include "vgs/simd/kernels.hpp"

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<std::string> manifest, features, images, checkpoint, sts_manifest;
  std::optional<std::string> split_spec, eval_split, model_name;
  std::optional<std::size_t> epochs, batch_size, total_captions;
  std::optional<double> margin;
  std::vector<std::size_t> specs;
  std::vector<std::string> inputs;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run config (e.g. a previous run_config.json)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Top-level random seed");
  cmd->add_option("--threads", f.threads, "Worker thread cap")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory");
}

std::string absolute_or_empty(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

vgs::app::RunConfig merge(const std::string& command, const Flags& f) {
  vgs::app::RunConfig cfg;
  if (!f.config.empty()) cfg = vgs::app::load_run_config(f.config);
  cfg.command = command;
  auto set = [](auto& target, const auto& flag) {
    if (flag) target = *flag;
  };
  set(cfg.seed, f.seed);
  set(cfg.threads, f.threads);
  set(cfg.paths.out, f.out);
  set(cfg.paths.manifest, f.manifest);
  set(cfg.paths.features, f.features);
  set(cfg.paths.images, f.images);
  set(cfg.paths.checkpoint, f.checkpoint);
  set(cfg.paths.sts_manifest, f.sts_manifest);
  set(cfg.split_spec, f.split_spec);
  set(cfg.eval_split, f.eval_split);
  set(cfg.model_name, f.model_name);
  set(cfg.training.epochs, f.epochs);
  set(cfg.training.batch_size, f.batch_size);
  set(cfg.training.margin, f.margin);
  set(cfg.subsets.total_captions, f.total_captions);
  if (!f.specs.empty()) cfg.subsets.captions_per_image = f.specs;
  if (!f.inputs.empty()) {
    cfg.inputs.clear();
    for (const auto& text : f.inputs) {
      const auto eq = text.find('=');
      if (eq == std::string::npos) {
        cfg.inputs.push_back({"", text});
      } else {
        cfg.inputs.push_back({text.substr(0, eq), text.substr(eq + 1)});
      }
    }
  }
  // Snapshots must not depend on the working directory.
  for (auto* p : {&cfg.paths.out, &cfg.paths.manifest, &cfg.paths.features, &cfg.paths.images,
                  &cfg.paths.checkpoint, &cfg.paths.sts_manifest}) {
    *p = absolute_or_empty(*p);
  }
  for (auto& input : cfg.inputs) input.path = absolute_or_empty(input.path);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visually grounded speech toolkit. Audio paths in manifests resolve against $VGS_DATA_ROOT when set."};
  app.require_subcommand(1);
  Flags f;

  auto* extract = app.add_subcommand("extract-features", "MFCC features for every caption of a manifest");
  auto* train = app.add_subcommand("train", "Train the caption and image encoders");
  auto* subsets = app.add_subcommand("make-subsets", "Fixed-size training subsets with 5..1 captions per image");
  auto* retrieval = app.add_subcommand("eval-retrieval", "Caption/image retrieval metrics for a checkpoint");
  auto* sts = app.add_subcommand("eval-sts", "Spoken STS correlations for a checkpoint");
  auto* aic = app.add_subcommand("compare-aic", "AIC comparison of regressions on per-pair STS similarities");
  for (auto* cmd : {extract, train, subsets, retrieval, sts, aic}) add_common(cmd, f);

  for (auto* cmd : {extract, train, subsets, retrieval}) {
    cmd->add_option("--manifest", f.manifest, "Caption manifest TSV");
    cmd->add_option("--split-spec", f.split_spec, "Expected split sizes: any, flickr8k, places, spokencoco");
  }
  for (auto* cmd : {train, retrieval}) {
    cmd->add_option("--features", f.features, "Feature store directory from extract-features");
    cmd->add_option("--images", f.images, "Image feature pack");
  }
  for (auto* cmd : {retrieval, sts}) cmd->add_option("--checkpoint", f.checkpoint, "Model checkpoint");
  train->add_option("--epochs", f.epochs, "Training epochs");
  train->add_option("--batch-size", f.batch_size, "Captions per batch");
  train->add_option("--margin", f.margin, "Hinge loss margin");
  subsets->add_option("--specs", f.specs, "Captions per image, one subset each")->delimiter(',');
  subsets->add_option("--total-captions", f.total_captions, "Captions in every subset");
  retrieval->add_option("--split", f.eval_split, "Split to evaluate: train, dev or test");
  sts->add_option("--sts-manifest", f.sts_manifest, "STS pair manifest TSV");
  sts->add_option("--model-name", f.model_name, "Model label in the long-format table");
  aic->add_option("--input", f.inputs, "sts_pairs.csv of one model, optionally as name=path");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto* chosen = app.get_subcommands().front();
    const auto config = merge(chosen->get_name(), f);
    std::clog << "vgs: kernels " << vgs::simd::level_name(vgs::simd::active_level()) << "\n";
    return vgs::app::run_command(config, std::clog);
  } catch (const std::exception& e) {
    std::cerr << "vgs: error: " << e.what() << "\n";
    return vgs::app::kExitFailure;
  }
}
