#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bvarml {

// Provenance record written next to every command's outputs.
struct RunManifest {
  std::string command;
  std::uint64_t config_digest = 0;
  std::uint64_t seed = 0;
  std::string code_version;
  std::map<std::string, double> timings_seconds;
  std::vector<std::string> outputs;

  std::string to_json() const;
  void write(const std::string& path) const;
};

extern const char* kCodeVersion;

}  // namespace bvarml
