#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace pairsim::csv {

/// Six significant digits; scientific notation when 0 < |x| < 1e-3. Independent
/// of the global locale.
std::string format_number(double value);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> columns);

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((emit(fields, first)), ...);
    out_ << '\n';
  }

 private:
  template <class T>
  void emit(const T& field, bool& first) {
    if (!first) out_ << ',';
    first = false;
    if constexpr (std::is_same_v<T, bool>) {
      out_ << (field ? 1 : 0);
    } else if constexpr (std::is_integral_v<T>) {
      out_ << field;
    } else if constexpr (std::is_floating_point_v<T>) {
      out_ << format_number(static_cast<double>(field));
    } else {
      out_ << std::string_view(field);
    }
  }

  std::ostream& out_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws ConfigError when absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view column_name) const;
};

/// Parses simple comma-separated text (no quoting). Lines starting with '#' are skipped.
Table read(std::istream& in);
Table parse(const std::string& text);

double parse_number(std::string_view text);

}  // namespace pairsim::csv
