#include "adavu/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "adavu/error.hpp"

namespace adavu::csv {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  while (true) {
    const auto comma = line.find(',', begin);
    const auto piece = line.substr(begin, comma == std::string_view::npos ? line.npos : comma - begin);
    fields.emplace_back(trim(piece));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return fields;
}

Reader::Reader(std::string path) : path_(std::move(path)), in_(path_) {
  if (!in_) throw IoError("cannot open " + path_ + " for reading");
}

void Reader::fail(const std::string& message) const { throw ParseError(path_, line_, message); }

std::vector<std::string> Reader::header() {
  std::vector<std::string> fields;
  if (!next(fields)) {
    line_ = std::max<std::size_t>(line_, 1);
    fail("missing header row");
  }
  return fields;
}

void Reader::expect_header(const std::vector<std::string>& expected) {
  const auto fields = header();
  if (fields != expected) {
    std::string want;
    for (const auto& f : expected) want += (want.empty() ? "" : ",") + f;
    fail("unexpected header, want `" + want + "`");
  }
}

bool Reader::next(std::vector<std::string>& fields) {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (trim(text).empty()) continue;
    fields = split(text);
    return true;
  }
  if (in_.bad()) throw IoError("read error in " + path_);
  return false;
}

std::int64_t Reader::to_int(const std::string& field, std::string_view what) const {
  std::int64_t value = 0;
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (field.empty() || res.ec != std::errc{} || res.ptr != end) {
    fail("invalid integer for " + std::string(what) + ": `" + field + "`");
  }
  return value;
}

double Reader::to_double(const std::string& field, std::string_view what) const {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (field.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(value)) {
    fail("invalid number for " + std::string(what) + ": `" + field + "`");
  }
  return value;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace adavu::csv
