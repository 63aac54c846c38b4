#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ccdfx::cli {

/// Shortest decimal text that parses back to exactly `value`; "nan",
/// "inf" and "-inf" for non-finite values.
std::string format_double(double value);

/// Comma-separated rows with a header, '\n' line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(double value);
  CsvWriter& cell(std::string_view text);
  // Keeps string literals off the bool overload.
  CsvWriter& cell(const char* text) { return cell(std::string_view(text)); }
  CsvWriter& cell(std::uint64_t value);
  CsvWriter& cell(bool value);
  /// Closes the current row; throws if its width differs from the header.
  void end_row();

  const std::string& str() const { return text_; }

 private:
  std::size_t width_;
  std::size_t pending_ = 0;
  std::string text_;
};

/// Writes `content` to a temporary sibling and renames it over `path`, so
/// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ccdfx::cli
