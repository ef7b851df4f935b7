#ifndef PURSUIT_SRC_INI_HPP_
#define PURSUIT_SRC_INI_HPP_

// Minimal section/key=value reader shared by the config and scenario loaders.
// Keeps sections in file order and allows repeated section names.

#include <string>
#include <utility>
#include <vector>

namespace pursuit::ini {

struct Section {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

/// Parses `text`. `origin` is used in error messages only.
/// Throws std::runtime_error with a line number on malformed input.
std::vector<Section> parse(const std::string& text, const std::string& origin);

/// Reads and parses a file; throws std::runtime_error naming the file if it
/// cannot be opened.
std::vector<Section> parse_file(const std::string& filename);

std::string read_file(const std::string& filename);

double to_double(const std::string& value, const std::string& context);
bool to_bool(const std::string& value, const std::string& context);
std::vector<double> to_doubles(const std::string& value, std::size_t count,
                               const std::string& context);

}  // namespace pursuit::ini

#endif  // PURSUIT_SRC_INI_HPP_
