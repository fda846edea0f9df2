#include "vgs/io/text_preprocess.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

#include "vgs/io/tsv.hpp"

namespace vgs::io {

namespace {

const std::regex& quote_spacing() {
  static const std::regex re(R"(\.\s+("|\xE2\x80\x9D)(?=\s|$))");
  return re;
}

std::string spell_out(const std::string& word) {
  std::string out;
  for (char c : word) {
    out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    out += '.';
  }
  return out;
}

}  // namespace

const std::vector<std::string>& default_initialisms() {
  static const std::vector<std::string> list = {"usa", "uk", "eu", "uae", "ussr", "fbi", "cia",
                                                "bbc", "cnn", "nba", "nfl", "nhs", "un"};
  return list;
}

TextPreprocessor::TextPreprocessor(std::vector<std::string> initialisms) {
  std::string alternation;
  for (const auto& w : initialisms) {
    for (char c : w) {
      if (!std::islower(static_cast<unsigned char>(c))) {
        throw std::invalid_argument("initialism '" + w + "' must be lowercase letters only");
      }
    }
    if (!alternation.empty()) alternation += '|';
    alternation += w;
  }
  if (alternation.empty()) alternation = "(?!)";
  initialism_pattern_ = std::regex("\\b(" + alternation + ")\\b(\\.?)");
}

void TextPreprocessor::add_rule(const std::string& pattern, const std::string& replacement) {
  extra_rules_.push_back({std::regex(pattern), replacement});
}

void TextPreprocessor::load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rule file " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw std::runtime_error(path.string() + ":" + std::to_string(number) + ": expected pattern<TAB>replacement");
    }
    try {
      add_rule(fields[0], fields[1]);
    } catch (const std::regex_error& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(number) + ": bad pattern: " + e.what());
    }
  }
}

std::string TextPreprocessor::operator()(std::string_view sentence) const {
  std::string text(sentence);

  std::string spelled;
  auto last = text.cbegin();
  for (std::sregex_iterator it(text.begin(), text.end(), initialism_pattern_), end; it != end; ++it) {
    const auto& m = *it;
    spelled.append(last, m[0].first);
    spelled += spell_out(m[1].str());
    last = m[0].second;
  }
  spelled.append(last, text.cend());

  std::string out = std::regex_replace(spelled, quote_spacing(), ".$1");
  for (const auto& rule : extra_rules_) out = std::regex_replace(out, rule.pattern, rule.replacement);
  return out;
}

std::string preprocess_sts_text(std::string_view sentence) {
  static const TextPreprocessor preprocessor;
  return preprocessor(sentence);
}

}  // namespace vgs::io
