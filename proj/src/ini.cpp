#include "ini.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pursuit::ini {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::vector<Section> parse(const std::string& text, const std::string& origin) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": malformed section header '" + line + "'");
      }
      sections.push_back(Section{trim(line.substr(1, line.size() - 2)), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value', got '" + line + "'");
    }
    if (sections.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": key outside any [section]");
    }
    sections.back().entries.emplace_back(trim(line.substr(0, eq)),
                                         trim(line.substr(eq + 1)));
  }
  return sections;
}

std::string read_file(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + filename);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<Section> parse_file(const std::string& filename) {
  return parse(read_file(filename), filename);
}

double to_double(const std::string& value, const std::string& context) {
  char* end = nullptr;
  const double d = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw std::runtime_error(context + ": not a number: '" + value + "'");
  }
  return d;
}

bool to_bool(const std::string& value, const std::string& context) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::runtime_error(context + ": not a boolean: '" + value + "'");
}

std::vector<double> to_doubles(const std::string& value, std::size_t count,
                               const std::string& context) {
  std::istringstream in(value);
  std::vector<double> out;
  double d;
  while (in >> d) out.push_back(d);
  if (out.size() != count || !in.eof()) {
    throw std::runtime_error(context + ": expected " + std::to_string(count) +
                             " numbers, got '" + value + "'");
  }
  return out;
}

}  // namespace pursuit::ini
