#include "vgs/app/run_config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "vgs/core/binary_io.hpp"
#include "vgs/io/config_json.hpp"

namespace vgs::app {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainingSettings, epochs, margin, batch_size, schedule, adam)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PathSettings, manifest, features, images, checkpoint, sts_manifest,
                                                out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SubsetSettings, total_captions, captions_per_image)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ModelInput, name, path)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, command, seed, threads, features, encoder, training, paths,
                                                split_spec, eval_split, subsets, model_name, inputs)

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw std::invalid_argument("config field '" + field + "': " + what);
}

template <typename F>
void check_field(const std::string& field, F&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    field_error(field, e.what());
  }
}

// Recursively compares keys against a default-constructed document.
void reject_unknown_keys(const nlohmann::json& given, const nlohmann::json& known, const std::string& prefix) {
  if (!given.is_object() || !known.is_object()) return;
  for (const auto& [key, value] : given.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!known.contains(key)) field_error(path, "unknown key");
    reject_unknown_keys(value, known.at(key), path);
  }
}

}  // namespace

void RunConfig::validate() const {
  if (threads < 1) field_error("threads", "must be >= 1");
  check_field("features", [&] { features.validate(); });
  check_field("encoder", [&] { encoder.validate(); });
  check_field("training.schedule", [&] { training.schedule.validate(); });
  if (training.epochs < 1) field_error("training.epochs", "must be >= 1");
  if (training.batch_size < 2) field_error("training.batch_size", "must be >= 2");
  if (!(training.margin >= 0.0)) field_error("training.margin", "must be >= 0");
  if (eval_split != "train" && eval_split != "dev" && eval_split != "test") {
    field_error("eval_split", "expected train, dev or test, got '" + eval_split + "'");
  }
  if (subsets.captions_per_image.empty()) field_error("subsets.captions_per_image", "must not be empty");
  std::set<std::size_t> seen;
  for (std::size_t c : subsets.captions_per_image) {
    if (c < 1 || c > 5) field_error("subsets.captions_per_image", "values must be within 1..5");
    if (!seen.insert(c).second) field_error("subsets.captions_per_image", "duplicate value " + std::to_string(c));
    if (subsets.total_captions % c != 0) {
      field_error("subsets.total_captions", std::to_string(subsets.total_captions) + " is not divisible by " +
                                                std::to_string(c));
    }
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config file " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config file " + path.string() + ": top level must be an object");
  reject_unknown_keys(j, nlohmann::json(RunConfig{}), "");
  try {
    return j.get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + path.string() + ": " + e.what());
  }
}

void write_run_config(const std::filesystem::path& path, const RunConfig& config) {
  const std::string text = nlohmann::json(config).dump(2) + "\n";
  write_file_bytes(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace vgs::app
