#pragma once
// Everything a command needs to run, merged from defaults, an optional JSON
// config file and command-line flags (in that order of precedence). Every
// command writes the merged result to <out>/run_config.json; passing that
// file back via --config reproduces the run.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vgs/ad/adam.hpp"
#include "vgs/ad/schedule.hpp"
#include "vgs/dsp/features.hpp"
#include "vgs/model/encoders.hpp"

namespace vgs::app {

struct TrainingSettings {
  std::size_t epochs = 32;
  double margin = 0.2;
  std::size_t batch_size = 32;
  ad::LrSchedule schedule;
  ad::AdamConfig adam;
};

struct PathSettings {
  std::string manifest;
  std::string features;
  std::string images;
  std::string checkpoint;
  std::string sts_manifest;
  std::string out;
};

struct SubsetSettings {
  std::size_t total_captions = 30000;
  std::vector<std::size_t> captions_per_image{5, 4, 3, 2, 1};
};

/// One compare-aic input: a per-pair similarity CSV and the model it names.
struct ModelInput {
  std::string name;
  std::string path;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  dsp::FeatureConfig features;
  model::EncoderConfig encoder;
  TrainingSettings training;
  PathSettings paths;
  std::string split_spec = "any";
  std::string eval_split = "test";
  SubsetSettings subsets;
  std::string model_name;
  std::vector<ModelInput> inputs;

  /// Field-level checks; throws std::invalid_argument naming the field.
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainingSettings& v);
void from_json(const nlohmann::json& j, TrainingSettings& v);
void to_json(nlohmann::json& j, const PathSettings& v);
void from_json(const nlohmann::json& j, PathSettings& v);
void to_json(nlohmann::json& j, const SubsetSettings& v);
void from_json(const nlohmann::json& j, SubsetSettings& v);
void to_json(nlohmann::json& j, const ModelInput& v);
void from_json(const nlohmann::json& j, ModelInput& v);
void to_json(nlohmann::json& j, const RunConfig& v);
void from_json(const nlohmann::json& j, RunConfig& v);

/// Reads a config file; unknown keys are rejected so typos surface.
RunConfig load_run_config(const std::filesystem::path& path);
void write_run_config(const std::filesystem::path& path, const RunConfig& config);

}  // namespace vgs::app
