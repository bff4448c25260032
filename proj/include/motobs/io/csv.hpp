#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace motobs {

/// Numeric CSV with a single header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> find(const std::string& column) const;
  /// Throws ConfigError naming the column when absent.
  std::size_t index(const std::string& column) const;
  std::vector<double> column(const std::string& column) const;
};

CsvTable parse_csv(const std::string& text, const std::string& source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

/// `%.9g` formatting used by every CSV the library writes.
std::string format_number(double v);

/// Writes text atomically enough for our purposes: to a temporary sibling,
/// then renamed. Throws ConfigError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace motobs
