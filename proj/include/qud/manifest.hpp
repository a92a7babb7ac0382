#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qud {

inline constexpr const char* kToolVersion = "0.1.0";

/// Reproducibility record written beside every output file as
/// `<output>.manifest.json`. The seed is always recorded, used or not.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;

  std::string to_json() const;
};

/// UTC timestamp, ISO 8601, second resolution.
std::string utc_now();

std::filesystem::path manifest_path_for(const std::filesystem::path& output);

}  // namespace qud
