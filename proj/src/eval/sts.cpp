#include "vgs/eval/sts.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "vgs/core/parallel.hpp"
#include "vgs/eval/retrieval.hpp"
#include "vgs/io/wav.hpp"

namespace vgs::eval {

VoicePairSimilarity voice_pair_similarity(const Matrix<double>& a, const Matrix<double>& b) {
  if (a.rows() == 0 || b.rows() == 0) throw std::invalid_argument("voice_pair_similarity: no voices");
  const Matrix<double> sims = cosine_similarity(a, b);
  double total = 0.0;
  for (double s : sims.data()) total += s;
  return {total / static_cast<double>(sims.size()), sims.size()};
}

namespace {

SubtaskCorrelation correlation_row(std::string label, const std::vector<const PairSimilarity*>& pairs) {
  SubtaskCorrelation row;
  row.subtask = std::move(label);
  row.n = pairs.size();
  if (row.n < 3) return row;
  std::vector<double> sims, human;
  for (const auto* p : pairs) {
    sims.push_back(p->similarity);
    human.push_back(p->human_score);
  }
  try {
    row.r = pearson(sims, human);
  } catch (const std::invalid_argument&) {
    return row;
  }
  if (row.n >= 4 && std::abs(*row.r) < 1.0) row.ci = fisher_ci(*row.r, row.n);
  return row;
}

}  // namespace

StsReport correlate(std::vector<PairSimilarity> pairs) {
  StsReport report;
  report.pairs = std::move(pairs);
  std::map<std::string, std::vector<const PairSimilarity*>> groups;
  std::vector<const PairSimilarity*> all;
  for (const auto& p : report.pairs) {
    groups[p.subtask].push_back(&p);
    all.push_back(&p);
  }
  for (const auto& [label, members] : groups) report.subtasks.push_back(correlation_row(label, members));
  report.overall = correlation_row("All", all);
  return report;
}

StsReport sts_eval(const io::StsManifest& manifest, const UtteranceEmbedder& embed, unsigned threads) {
  if (manifest.voice_count() == 0) throw std::invalid_argument("sts_eval: manifest lists no voices");

  std::map<std::string, std::size_t> slot;
  std::vector<std::string> paths;
  for (const auto& p : manifest.pairs) {
    for (const auto* list : {&p.utterances_a, &p.utterances_b}) {
      for (const auto& u : *list) {
        if (slot.emplace(u, paths.size()).second) paths.push_back(u);
      }
    }
  }
  std::vector<std::optional<std::vector<double>>> embeddings(paths.size());
  parallel_for(paths.size(), threads, [&](std::size_t i) { embeddings[i] = embed(manifest.utterance_path(paths[i])); });

  std::vector<PairSimilarity> sims;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
  for (const auto& p : manifest.pairs) {
    auto gather = [&](const std::vector<std::string>& utterances) -> std::optional<Matrix<double>> {
      Matrix<double> m;
      for (std::size_t v = 0; v < utterances.size(); ++v) {
        const auto& e = embeddings[slot.at(utterances[v])];
        if (!e) {
          warnings.push_back("pair " + p.pair_id + ": utterance " + utterances[v] + " unavailable, pair skipped");
          return std::nullopt;
        }
        if (v == 0) m = Matrix<double>(utterances.size(), e->size());
        std::copy(e->begin(), e->end(), m.row(v).begin());
      }
      return m;
    };
    const auto a = gather(p.utterances_a);
    const auto b = a ? gather(p.utterances_b) : std::nullopt;
    if (!a || !b) {
      ++skipped;
      continue;
    }
    const auto vp = voice_pair_similarity(*a, *b);
    sims.push_back({p.pair_id, p.subtask, p.human_score, vp.mean, vp.terms});
  }
  StsReport report = correlate(std::move(sims));
  report.skipped_pairs = skipped;
  report.warnings = std::move(warnings);
  return report;
}

StsReport sts_eval(const model::VgsModel<float>& model, const io::StsManifest& manifest,
                   const dsp::FeatureConfig& features, unsigned threads) {
  const dsp::MfccExtractor extractor(features);
  return sts_eval(
      manifest,
      [&](const std::filesystem::path& path) -> std::optional<std::vector<double>> {
        if (!std::filesystem::exists(path)) return std::nullopt;
        const auto e = model.embed_caption(extractor.extract(io::read_wav(path, features.sample_rate)));
        return std::vector<double>(e.begin(), e.end());
      },
      threads);
}

}  // namespace vgs::eval
