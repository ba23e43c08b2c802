#pragma once

// Minimal CSV helpers shared by the I/O and experiment code. No quoting:
// every exchange format here is plain numbers and identifiers.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "rfdm/error.hpp"

namespace rfdm::detail {

struct CsvRow {
  std::size_t line = 0;  // 1-based line number in the file
  std::vector<std::string_view> cells;
};

/// Reads a whole file; skips blank lines and lines starting with '#'.
class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path, bool keep_comments = false);

  const std::vector<CsvRow>& rows() const noexcept { return rows_; }
  const std::vector<std::string>& comments() const noexcept { return comments_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::string text_;
  std::vector<CsvRow> rows_;
  std::vector<std::string> comments_;
};

double parse_double(std::string_view cell, const std::filesystem::path& path, std::size_t line,
                    std::size_t col);
long long parse_int(std::string_view cell, const std::filesystem::path& path, std::size_t line,
                    std::size_t col);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

std::ofstream open_output(const std::filesystem::path& path);

}  // namespace rfdm::detail
