#include "pairsim/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include "pairsim/errors.hpp"

namespace pairsim::csv {

std::string format_number(double value) {
  char buf[64];
  const double magnitude = std::abs(value);
  const auto fmt = (magnitude > 0.0 && magnitude < 1e-3) ? std::chars_format::scientific
                                                         : std::chars_format::general;
  const int precision = fmt == std::chars_format::scientific ? 5 : 6;
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, fmt, precision);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void Writer::header(std::initializer_list<std::string_view> columns) {
  bool first = true;
  for (auto c : columns) {
    if (!first) out_ << ',';
    first = false;
    out_ << c;
  }
  out_ << '\n';
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ConfigError("csv: no column '" + std::string(name) + "'");
}

double Table::number(std::size_t row, std::string_view column_name) const {
  return parse_number(rows.at(row).at(column(column_name)));
}

Table read(std::istream& in) {
  Table table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

Table parse(const std::string& text) {
  std::istringstream in(text);
  return read(in);
}

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("csv: not a number: '" + std::string(text) + "'");
  return value;
}

}  // namespace pairsim::csv
