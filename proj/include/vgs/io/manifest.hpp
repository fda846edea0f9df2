#pragma once
// Caption/image dataset manifests.
//
// TSV with header `caption_id<TAB>image_id<TAB>audio_path<TAB>split`; split is
// one of train, dev, test. '#' lines are comments. Audio paths are resolved
// relative to $VGS_DATA_ROOT when set, else to the manifest's directory.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace vgs::io {

enum class Split { kTrain, kDev, kTest };

std::string to_string(Split split);
Split parse_split(const std::string& text);

struct ManifestRecord {
  std::string caption_id;
  std::string image_id;
  std::string audio_path;
  Split split = Split::kTrain;
  std::size_t line = 0;
};

/// Expected image counts per split; unset counts are not checked.
struct SplitSpec {
  std::string name = "any";
  std::optional<std::size_t> train_images;
  std::optional<std::size_t> dev_images;
  std::optional<std::size_t> test_images;

  static SplitSpec any();
  static SplitSpec flickr8k();    // 6000 / 1000 / 1000
  static SplitSpec places();      // 400000 / 1000 / 1000
  static SplitSpec spokencoco();  // train unchecked / 1000 / 1000
  /// Looks up one of the named specs above.
  static SplitSpec named(const std::string& name);
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::filesystem::path base_dir;

  std::vector<ManifestRecord> records_in(Split split) const;
  /// Distinct image ids of a split, sorted.
  std::vector<std::string> images_in(Split split) const;
  std::filesystem::path audio_path(const ManifestRecord& record) const;
};

/// Parses and validates: unique caption ids, image ids confined to one split,
/// split image counts matching `spec`, and (when `known_images` is given)
/// every image id present in it. Errors carry the file and line.
DatasetManifest load_manifest(const std::filesystem::path& path, const SplitSpec& spec = SplitSpec::any(),
                              const std::set<std::string>* known_images = nullptr);

/// Checks a manifest already in memory against the same rules.
void validate_manifest(const DatasetManifest& manifest, const SplitSpec& spec, const std::string& source,
                       const std::set<std::string>* known_images = nullptr);

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records);

}  // namespace vgs::io
