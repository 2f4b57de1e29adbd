#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace awn::manifest {

inline constexpr const char* kToolVersion = "0.1.0";

/// Sidecar describing one CLI run: parameter snapshot, input digests, and
/// output paths. Written next to each output as <output>.manifest.json.
/// Timestamps live only here, so the outputs themselves stay byte-identical
/// across reruns.
struct RunManifest {
  std::string subcommand;
  nlohmann::json parameters;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
};

void write(const RunManifest& manifest);

}  // namespace awn::manifest
