#include "icprobe/manifest.hpp"

#include "icprobe/hashing.hpp"
#include "icprobe/textio.hpp"

namespace icprobe {

void RunManifest::AddInput(const std::string& role, const std::filesystem::path& path) {
  inputs[role] = path.string();
  input_hashes[role] = Sha256Hex(textio::ReadFile(path));
}

nlohmann::json RunManifest::ToJson() const {
  return nlohmann::json{{"stage", stage},
                        {"seed", seed},
                        {"backend_id", backend_id},
                        {"endpoint", endpoint},
                        {"mode", mode},
                        {"out_dir", out_dir},
                        {"tool_version", tool_version},
                        {"inputs", inputs},
                        {"input_hashes", input_hashes},
                        {"options", options}};
}

// Locations are recorded but not hashed, so a run reproduced elsewhere keeps its hash.
std::string RunManifest::Hash() const {
  nlohmann::json j = ToJson();
  j.erase("out_dir");
  j.erase("inputs");
  return Sha256Hex(j.dump());
}

std::string WriteManifest(const RunManifest& manifest, const std::filesystem::path& dir) {
  nlohmann::json j = manifest.ToJson();
  const std::string hash = manifest.Hash();
  j["manifest_hash"] = hash;
  textio::WriteFile(dir / (manifest.stage + ".manifest.json"), j.dump(2) + "\n");
  return hash;
}

}  // namespace icprobe
