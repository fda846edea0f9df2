#pragma once
// Tab-separated tables with a header line. Blank lines and lines starting
// with '#' are skipped; line numbers are kept for error messages.

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace vgs::io {

struct TsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct TsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<TsvRow> rows;

  /// Index of a header column; throws naming the source when absent.
  std::size_t column(std::string_view name) const;
};

/// Every row must have as many fields as the header.
TsvTable parse_tsv(std::istream& in, const std::string& source);
TsvTable read_tsv(const std::filesystem::path& path);

std::vector<std::string> split_tabs(std::string_view line);

std::size_t parse_size(const std::string& text, const std::string& source, std::size_t line);
double parse_double(const std::string& text, const std::string& source, std::size_t line);

/// Relative paths resolve against $VGS_DATA_ROOT when set, else `base_dir`.
std::filesystem::path resolve_data_path(const std::filesystem::path& base_dir, const std::string& path);

}  // namespace vgs::io
