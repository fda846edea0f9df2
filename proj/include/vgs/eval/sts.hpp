#pragma once
// Spoken semantic-textual-similarity evaluation: per-pair similarity is the
// mean cosine similarity over every (voice of sentence a, voice of sentence
// b) combination, correlated with the human scores per subtask and overall.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vgs/core/matrix.hpp"
#include "vgs/dsp/features.hpp"
#include "vgs/eval/stats.hpp"
#include "vgs/io/sts_manifest.hpp"
#include "vgs/model/encoders.hpp"

namespace vgs::eval {

struct VoicePairSimilarity {
  double mean = 0.0;
  std::size_t terms = 0;  // voices_a * voices_b
};

/// a and b hold one embedding row per voice.
VoicePairSimilarity voice_pair_similarity(const Matrix<double>& a, const Matrix<double>& b);

struct PairSimilarity {
  std::string pair_id;
  std::string subtask;
  double human_score = 0.0;
  double similarity = 0.0;
  std::size_t terms = 0;
};

struct SubtaskCorrelation {
  std::string subtask;  // "All" for the pooled row
  std::size_t n = 0;
  std::optional<double> r;                  // needs n >= 3
  std::optional<ConfidenceInterval> ci;     // needs n >= 4 and |r| < 1
};

struct StsReport {
  std::vector<SubtaskCorrelation> subtasks;  // sorted by label
  SubtaskCorrelation overall;
  std::vector<PairSimilarity> pairs;
  std::size_t skipped_pairs = 0;
  std::vector<std::string> warnings;
};

/// Pearson r with a 95% interval for every subtask and for all pairs pooled.
StsReport correlate(std::vector<PairSimilarity> pairs);

/// Maps an utterance path to its embedding, or nullopt when unavailable.
using UtteranceEmbedder = std::function<std::optional<std::vector<double>>(const std::filesystem::path&)>;

/// Pairs with any unavailable utterance are skipped and counted.
StsReport sts_eval(const io::StsManifest& manifest, const UtteranceEmbedder& embed, unsigned threads = 1);

/// Reads each utterance as WAV, extracts features and encodes it.
StsReport sts_eval(const model::VgsModel<float>& model, const io::StsManifest& manifest,
                   const dsp::FeatureConfig& features = {}, unsigned threads = 1);

}  // namespace vgs::eval
