#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace adavu::csv {

// Splits one line on commas; surrounding blanks of each field are trimmed.
std::vector<std::string> split(std::string_view line);

std::string_view trim(std::string_view text);

// Line-oriented reader for the comma-separated formats used by the toolkit.
// Blank lines are skipped; every error carries file name and line number.
class Reader {
 public:
  explicit Reader(std::string path);

  // Reads the header row and throws ParseError unless it equals `expected`.
  void expect_header(const std::vector<std::string>& expected);
  // Reads the header row and returns its fields.
  std::vector<std::string> header();

  // Next non-blank record, or false at end of file.
  bool next(std::vector<std::string>& fields);

  std::size_t line() const { return line_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const;

  std::int64_t to_int(const std::string& field, std::string_view what) const;
  double to_double(const std::string& field, std::string_view what) const;

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

// Opens `path` for writing and throws IoError on failure.
std::ofstream open_for_write(const std::string& path);

// Shortest text that parses back to the identical double.
std::string format_double(double value);

}  // namespace adavu::csv
