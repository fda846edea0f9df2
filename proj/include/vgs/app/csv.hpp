#pragma once
// Minimal CSV output: comma separated, fields quoted only when needed,
// doubles printed with enough digits to round-trip.

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace vgs::app {

std::string csv_field(const std::string& text);
std::string csv_number(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& row(const std::vector<std::string>& fields);
  std::string str() const { return out_.str(); }
  /// Written via a temporary file and rename.
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t width_;
  std::ostringstream out_;
};

/// Parses CSV produced by CsvWriter (RFC 4180 quoting). The first row is the
/// header.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace vgs::app
