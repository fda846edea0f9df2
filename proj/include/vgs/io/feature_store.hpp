#pragma once
// Per-utterance feature files plus a sidecar index.
//
// Feature file (little-endian): magic "VGSFEAT1" | u32 frames | u32 width
// (always 39) | frames*width f32, row-major.
// Index "index.tsv": header `caption_id<TAB>file<TAB>frames`, one line per
// utterance, file names relative to the store directory.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vgs/dsp/features.hpp"

namespace vgs::io {

void write_feature_file(const std::filesystem::path& path, const dsp::AudioFeatures& features);
dsp::AudioFeatures read_feature_file(const std::filesystem::path& path);

struct FeatureIndexEntry {
  std::string caption_id;
  std::string file;
  std::size_t frames = 0;
};

void write_feature_index(const std::filesystem::path& dir, const std::vector<FeatureIndexEntry>& entries);

class FeatureStore {
 public:
  static FeatureStore open(const std::filesystem::path& dir);

  bool contains(const std::string& caption_id) const { return entries_.contains(caption_id); }
  std::size_t size() const { return entries_.size(); }
  dsp::AudioFeatures load(const std::string& caption_id) const;
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::map<std::string, FeatureIndexEntry> entries_;
};

/// File name used for a caption id inside a store; characters outside
/// [A-Za-z0-9._-] are percent-escaped.
std::string feature_file_name(const std::string& caption_id);

}  // namespace vgs::io
