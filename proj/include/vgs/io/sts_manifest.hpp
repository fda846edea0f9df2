#pragma once
// Spoken STS pair manifests.
//
// TSV header: pair_id, subtask, score, sentence_a, sentence_b, followed by
// one `a:<voice>` and one `b:<voice>` column per voice, holding utterance
// paths. Both sentences must list the same voices. Subtasks are labelled
// "<year>/<name>", e.g. "2012/MSRpar".

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vgs::io {

struct StsSubtask {
  int year;
  const char* name;
  std::size_t pairs;
  const char* source;

  std::string label() const { return std::to_string(year) + "/" + name; }
};

/// The 24 STS 2012-2016 subtasks with their pair counts (12,544 in total).
const std::vector<StsSubtask>& sts_inventory();
bool is_known_subtask(const std::string& label);

struct StsPair {
  std::string pair_id;
  std::string subtask;
  std::string sentence_a;
  std::string sentence_b;
  double human_score = 0.0;  // [0, 5]
  std::vector<std::string> utterances_a;  // one per voice
  std::vector<std::string> utterances_b;
  std::size_t line = 0;
};

struct StsManifest {
  std::vector<std::string> voices;
  std::vector<StsPair> pairs;
  std::filesystem::path base_dir;

  std::size_t voice_count() const { return voices.size(); }
  /// Same-voice utterance pairs available: pairs x voices.
  std::size_t utterance_pair_count() const { return pairs.size() * voices.size(); }
  /// Pair indices grouped by subtask label.
  std::map<std::string, std::vector<std::size_t>> by_subtask() const;
  std::filesystem::path utterance_path(const std::string& path) const;
};

StsManifest load_sts_manifest(const std::filesystem::path& path);
void write_sts_manifest(const std::filesystem::path& path, const StsManifest& manifest);

}  // namespace vgs::io
