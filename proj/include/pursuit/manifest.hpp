#ifndef PURSUIT_MANIFEST_HPP
#define PURSUIT_MANIFEST_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pursuit {

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& filename);

/// Audit record for one CLI invocation: what ran, on which exact inputs, and
/// which files it was going to write. Written before any result file.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::uint64_t>> input_digests;
  std::vector<std::string> outputs;
  std::string config_text;  // resolved configuration snapshot
};

std::string manifest_to_text(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::string& filename);

}  // namespace pursuit

#endif  // PURSUIT_MANIFEST_HPP
