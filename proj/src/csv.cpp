#include "csv.hpp"

#include <charconv>
#include <cmath>

#include "carbonsched/errors.hpp"

namespace carbonsched::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    out.emplace_back(trim(line.substr(begin, comma - begin)));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<Row> read(std::string_view document, std::string_view header) {
  // Tolerate a UTF-8 byte order mark.
  if (document.substr(0, 3) == "\xEF\xBB\xBF") document.remove_prefix(3);

  const std::vector<std::string> expected = split(header);
  std::vector<Row> rows;
  bool seen_header = false;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= document.size()) {
    const std::size_t nl = document.find('\n', begin);
    const std::string_view raw =
        document.substr(begin, nl == std::string_view::npos ? std::string_view::npos : nl - begin);
    ++line_no;
    begin = nl == std::string_view::npos ? document.size() + 1 : nl + 1;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    auto fields = split(line);
    if (!seen_header) {
      if (fields != expected) {
        throw DataError("expected header '" + std::string(header) + "'", line_no);
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != expected.size()) {
      throw DataError("malformed row (expected " + std::to_string(expected.size()) +
                          " fields, got " + std::to_string(fields.size()) + ")",
                      line_no);
    }
    rows.push_back({line_no, std::move(fields)});
  }
  if (!seen_header) throw DataError("missing header '" + std::string(header) + "'");
  return rows;
}

double parse_real(std::string_view field, std::size_t line, std::string_view what) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw DataError("malformed " + std::string(what) + " '" + std::string(field) + "'", line);
  }
  return value;
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace carbonsched::csv
