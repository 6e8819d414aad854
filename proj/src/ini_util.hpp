#pragma once

// Thin helpers over Boost.PropertyTree's INI reader shared by the model and
// run-config loaders. Errors surface as pairsim::ConfigError.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <optional>
#include <string>
#include <vector>

namespace pairsim::detail {

using Tree = boost::property_tree::ptree;

Tree parse_ini_text(const std::string& text, const std::string& origin);
Tree read_ini_file(const std::string& path);

std::string trim(const std::string& s);
double parse_double(const std::string& text, const std::string& key);
std::vector<std::string> split(const std::string& text, char sep);

std::optional<std::string> get_string(const Tree& tree, const std::string& key);
std::string require_string(const Tree& tree, const std::string& key);
double require_double(const Tree& tree, const std::string& key);
double get_double(const Tree& tree, const std::string& key, double fallback);
bool get_bool(const Tree& tree, const std::string& key, bool fallback);
std::vector<double> require_doubles(const Tree& tree, const std::string& key);
std::optional<std::vector<double>> get_doubles(const Tree& tree, const std::string& key);

}  // namespace pairsim::detail
