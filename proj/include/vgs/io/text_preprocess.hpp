#pragma once
// Text clean-up applied to STS sentences before speech synthesis.
//
// Built-in rules:
//  1. A sentence-final period separated from its closing quotation mark by
//     whitespace is joined to it: `hello. "` -> `hello."`.
//  2. Known lowercase initialisms are spelled out letter by letter:
//     `usa` -> `U.S.A.` (a directly following period is absorbed).
// Additional regex rules can be loaded from a file of
// `pattern<TAB>replacement` lines; they run after the built-ins.

#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace vgs::io {

const std::vector<std::string>& default_initialisms();

class TextPreprocessor {
 public:
  explicit TextPreprocessor(std::vector<std::string> initialisms = default_initialisms());

  void add_rule(const std::string& pattern, const std::string& replacement);
  void load_rules(const std::filesystem::path& path);

  std::string operator()(std::string_view sentence) const;

 private:
  struct Rule {
    std::regex pattern;
    std::string replacement;
  };
  std::regex initialism_pattern_;
  std::vector<Rule> extra_rules_;
};

/// Applies the built-in rules only.
std::string preprocess_sts_text(std::string_view sentence);

}  // namespace vgs::io
