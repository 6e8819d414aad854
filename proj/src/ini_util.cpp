#include "ini_util.hpp"

#include <charconv>
#include <sstream>

#include "pairsim/errors.hpp"

namespace pairsim::detail {

Tree parse_ini_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  Tree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

Tree read_ini_file(const std::string& path) {
  Tree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(path + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError("'" + key + "': not a number: '" + t + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::optional<std::string> get_string(const Tree& tree, const std::string& key) {
  if (auto v = tree.get_optional<std::string>(key)) return trim(*v);
  return std::nullopt;
}

std::string require_string(const Tree& tree, const std::string& key) {
  if (auto v = get_string(tree, key)) return *v;
  throw ConfigError("missing key '" + key + "'");
}

double require_double(const Tree& tree, const std::string& key) {
  return parse_double(require_string(tree, key), key);
}

double get_double(const Tree& tree, const std::string& key, double fallback) {
  if (auto v = get_string(tree, key)) return parse_double(*v, key);
  return fallback;
}

bool get_bool(const Tree& tree, const std::string& key, bool fallback) {
  const auto v = get_string(tree, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ConfigError("'" + key + "': not a boolean: '" + *v + "'");
}

std::vector<double> require_doubles(const Tree& tree, const std::string& key) {
  if (auto v = get_doubles(tree, key)) return *v;
  throw ConfigError("missing key '" + key + "'");
}

std::optional<std::vector<double>> get_doubles(const Tree& tree, const std::string& key) {
  const auto v = get_string(tree, key);
  if (!v) return std::nullopt;
  std::vector<double> out;
  if (v->empty()) return out;
  for (const auto& item : split(*v, ',')) out.push_back(parse_double(item, key));
  return out;
}

}  // namespace pairsim::detail
