#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace adherence {

struct CsvRow {
  std::size_t line = 0;  // 1-based line number in the source file
  std::vector<std::string> fields;

  bool all_empty() const;
};

/// A parsed CSV file. Fields are unquoted; the formats used here never
/// contain embedded commas, but double-quoted fields are still honored.
struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  /// Index of `column` in the header, or npos.
  std::size_t column(std::string_view column) const;
};

std::vector<std::string> split_csv_line(std::string_view line);

/// Throws UnreadableFile if the file cannot be opened or has no header.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text, std::string name);

/// Writes `\n`-terminated lines; quotes a field only when it contains a comma,
/// quote or newline.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& fields);

  template <typename... Fields>
  void write(const Fields&... fields) {
    row(std::vector<std::string>{to_field(fields)...});
  }

 private:
  static std::string to_field(const std::string& s) { return s; }
  static std::string to_field(std::string_view s) { return std::string(s); }
  static std::string to_field(const char* s) { return s; }
  static std::string to_field(double v);
  static std::string to_field(int v) { return std::to_string(v); }
  static std::string to_field(long v) { return std::to_string(v); }
  static std::string to_field(long long v) { return std::to_string(v); }
  static std::string to_field(unsigned long v) { return std::to_string(v); }
  static std::string to_field(unsigned long long v) { return std::to_string(v); }

  std::ostream& out_;
};

/// Shortest round-trippable decimal representation.
std::string format_real(double v);

}  // namespace adherence
