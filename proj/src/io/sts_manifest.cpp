#include "vgs/io/sts_manifest.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include "vgs/core/binary_io.hpp"
#include "vgs/io/tsv.hpp"

namespace vgs::io {

const std::vector<StsSubtask>& sts_inventory() {
  static const std::vector<StsSubtask> inventory = {
      {2012, "MSRpar", 750, "newswire"},
      {2012, "MSRvid", 750, "videos"},
      {2012, "SMTeuroparl", 459, "glosses"},
      {2012, "OnWN", 750, "WMT eval."},
      {2012, "SMTnews", 399, "WMT eval."},
      {2013, "FNWN", 189, "newswire"},
      {2013, "HDL", 750, "glosses"},
      {2013, "OnWN", 561, "glosses"},
      {2014, "Deft-forum", 450, "forum posts"},
      {2014, "Deft-news", 300, "news summary"},
      {2014, "HDL", 750, "newswire headlines"},
      {2014, "Images", 750, "image descriptions"},
      {2014, "OnWN", 750, "glosses"},
      {2014, "Tweet-news", 750, "tweet-news pairs"},
      {2015, "Answers-forum", 375, "Q&A forum answers"},
      {2015, "Answers-students", 750, "student answers"},
      {2015, "Belief", 375, "committed belief"},
      {2015, "HDL", 750, "newswire headlines"},
      {2015, "Images", 750, "image descriptions"},
      {2016, "Answer-Answer", 254, "Q&A forum answers"},
      {2016, "HDL", 249, "newswire headlines"},
      {2016, "Plagiarism", 230, "short-answer plagiarism"},
      {2016, "Postediting", 244, "MT postedits"},
      {2016, "Question-Question", 209, "Q&A forum questions"},
  };
  return inventory;
}

bool is_known_subtask(const std::string& label) {
  for (const auto& s : sts_inventory()) {
    if (s.label() == label) return true;
  }
  return false;
}

std::map<std::string, std::vector<std::size_t>> StsManifest::by_subtask() const {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) out[pairs[i].subtask].push_back(i);
  return out;
}

std::filesystem::path StsManifest::utterance_path(const std::string& path) const {
  return resolve_data_path(base_dir, path);
}

StsManifest load_sts_manifest(const std::filesystem::path& path) {
  const auto table = read_tsv(path);
  const std::size_t id_col = table.column("pair_id");
  const std::size_t subtask_col = table.column("subtask");
  const std::size_t score_col = table.column("score");
  const std::size_t a_col = table.column("sentence_a");
  const std::size_t b_col = table.column("sentence_b");

  StsManifest manifest;
  manifest.base_dir = path.parent_path();
  std::vector<std::size_t> a_cols, b_cols;
  std::vector<std::string> b_voices;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::string& h = table.header[i];
    if (h.rfind("a:", 0) == 0) {
      manifest.voices.push_back(h.substr(2));
      a_cols.push_back(i);
    } else if (h.rfind("b:", 0) == 0) {
      b_voices.push_back(h.substr(2));
      b_cols.push_back(i);
    }
  }
  if (b_voices != manifest.voices) {
    throw std::runtime_error(table.source + ": sentence a and b voice columns differ");
  }

  std::set<std::string> seen;
  for (const auto& row : table.rows) {
    const std::string where = table.source + ":" + std::to_string(row.line) + ": ";
    StsPair p;
    p.pair_id = row.fields[id_col];
    p.subtask = row.fields[subtask_col];
    p.sentence_a = row.fields[a_col];
    p.sentence_b = row.fields[b_col];
    p.line = row.line;
    p.human_score = parse_double(row.fields[score_col], table.source, row.line);
    if (!(p.human_score >= 0.0 && p.human_score <= 5.0)) {
      throw std::runtime_error(where + "score " + row.fields[score_col] + " outside [0, 5]");
    }
    if (!is_known_subtask(p.subtask)) throw std::runtime_error(where + "unknown subtask '" + p.subtask + "'");
    if (!seen.insert(p.pair_id).second) throw std::runtime_error(where + "duplicate pair id " + p.pair_id);
    for (std::size_t c : a_cols) p.utterances_a.push_back(row.fields[c]);
    for (std::size_t c : b_cols) p.utterances_b.push_back(row.fields[c]);
    manifest.pairs.push_back(std::move(p));
  }
  return manifest;
}

void write_sts_manifest(const std::filesystem::path& path, const StsManifest& manifest) {
  std::ostringstream out;
  out << "pair_id\tsubtask\tscore\tsentence_a\tsentence_b";
  for (const auto& v : manifest.voices) out << "\ta:" << v;
  for (const auto& v : manifest.voices) out << "\tb:" << v;
  out << '\n';
  for (const auto& p : manifest.pairs) {
    out << p.pair_id << '\t' << p.subtask << '\t' << p.human_score << '\t' << p.sentence_a << '\t' << p.sentence_b;
    for (const auto& u : p.utterances_a) out << '\t' << u;
    for (const auto& u : p.utterances_b) out << '\t' << u;
    out << '\n';
  }
  const std::string text = out.str();
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace vgs::io
