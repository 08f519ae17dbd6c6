#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace icprobe {

inline constexpr const char* kToolVersion = "0.3.0";

/// Everything needed to reproduce one pipeline stage. Contains no clock
/// values, so identical invocations hash identically.
struct RunManifest {
  std::string stage;
  std::uint64_t seed = 0;
  std::string backend_id;
  std::string endpoint;
  std::string mode;
  std::string out_dir;
  std::string tool_version = kToolVersion;
  std::map<std::string, std::string> inputs;        // role -> path
  std::map<std::string, std::string> input_hashes;  // role -> sha256 of contents
  std::map<std::string, std::string> options;

  // Records the path and content hash of an input file.
  void AddInput(const std::string& role, const std::filesystem::path& path);

  nlohmann::json ToJson() const;
  std::string Hash() const;  // sha256 of the compact JSON form
};

// Writes <dir>/<stage>.manifest.json and returns its hash.
std::string WriteManifest(const RunManifest& manifest, const std::filesystem::path& dir);

}  // namespace icprobe
