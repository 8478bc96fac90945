#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wavecrest {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string join_ids(const std::vector<std::int64_t>& ids, char sep = ';');

/// Minimal CSV builder; fields are written verbatim.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string_view> header);

  CsvWriter& field(std::string_view s);
  CsvWriter& field(double v);
  CsvWriter& field(std::int64_t v);
  void end_row();

  const std::string& text() const noexcept { return out_; }

 private:
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string out_;
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace wavecrest
