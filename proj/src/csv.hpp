#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace carbonsched::csv {

struct Row {
  std::size_t line;
  std::vector<std::string> fields;
};

/// Splits a small CSV document (no quoting) into trimmed rows. Blank lines and
/// lines starting with `#` are skipped. The first remaining line must equal
/// `header` field-for-field; every data row must have the same field count.
std::vector<Row> read(std::string_view document, std::string_view header);

double parse_real(std::string_view field, std::size_t line, std::string_view what);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

}  // namespace carbonsched::csv
