#include "csv.hpp"

#include <array>
#include <sstream>

namespace rfdm::detail {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string where(const std::filesystem::path& path, std::size_t line, std::size_t col) {
  return path.string() + ":" + std::to_string(line) + ", column " + std::to_string(col + 1);
}

}  // namespace

CsvFile::CsvFile(const std::filesystem::path& path, bool keep_comments) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  text_ = ss.str();

  std::string_view all(text_);
  std::size_t line_no = 0;
  while (!all.empty()) {
    const std::size_t nl = all.find('\n');
    std::string_view line = all.substr(0, nl);
    all = nl == std::string_view::npos ? std::string_view{} : all.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (keep_comments) comments_.emplace_back(line);
      continue;
    }
    CsvRow row{line_no, {}};
    while (true) {
      const std::size_t comma = line.find(',');
      row.cells.push_back(trim(line.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    rows_.push_back(std::move(row));
  }
}

double parse_double(std::string_view cell, const std::filesystem::path& path, std::size_t line,
                    std::size_t col) {
  double v = 0.0;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw DataError("malformed number '" + std::string(cell) + "' at " + where(path, line, col));
  }
  return v;
}

long long parse_int(std::string_view cell, const std::filesystem::path& path, std::size_t line,
                    std::size_t col) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw DataError("malformed integer '" + std::string(cell) + "' at " + where(path, line, col));
  }
  return v;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace rfdm::detail
