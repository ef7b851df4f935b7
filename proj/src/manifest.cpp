#include "pursuit/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pursuit/version.hpp"

namespace pursuit {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= static_cast<std::uint64_t>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t fnv1a64_file(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file for digest: " + filename);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fnv1a64(buffer.str());
}

std::string manifest_to_text(const RunManifest& manifest) {
  std::ostringstream out;
  out << "pursuit_lab " << kVersion << "\n";
  out << "command " << manifest.command << "\n";
  for (const auto& [file, digest] : manifest.input_digests) {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(digest));
    out << "input " << file << " fnv1a64=" << hex << "\n";
  }
  for (const auto& file : manifest.outputs) {
    out << "output " << file << "\n";
  }
  out << "--- resolved configuration ---\n";
  out << manifest.config_text;
  return out.str();
}

void write_manifest(const RunManifest& manifest, const std::string& filename) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write manifest: " + filename);
  }
  out << manifest_to_text(manifest);
}

}  // namespace pursuit
