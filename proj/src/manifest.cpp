#include "bvarml/manifest.hpp"

#include <fstream>
#include <json.hpp>

namespace bvarml {

const char* kCodeVersion = "0.1.0";

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["config_digest"] = config_digest;
  j["seed"] = seed;
  j["code_version"] = code_version;
  j["timings_seconds"] = timings_seconds;
  j["outputs"] = outputs;
  return j.dump(2);
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  out << to_json() << '\n';
}

}  // namespace bvarml
