#include "awn/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "awn/common.hpp"

namespace awn::manifest {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

}  // namespace

void write(const RunManifest& manifest) {
  nlohmann::json doc;
  doc["tool"] = std::string("awn ") + kToolVersion;
  doc["subcommand"] = manifest.subcommand;
  doc["timestampUtc"] = utc_now();
  doc["parameters"] = manifest.parameters;
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& path : manifest.inputs) {
    nlohmann::json entry;
    entry["path"] = path.string();
    entry["fnv1a64"] = fnv1a64_file(path);
    inputs.push_back(std::move(entry));
  }
  doc["inputs"] = std::move(inputs);
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& path : manifest.outputs) outputs.push_back(path.string());
  doc["outputs"] = std::move(outputs);

  for (const auto& output : manifest.outputs) {
    std::filesystem::path path = output;
    path += ".manifest.json";
    std::ofstream out(path);
    if (!out) throw InputError("cannot write manifest: " + path.string());
    out << doc.dump(2) << '\n';
  }
}

}  // namespace awn::manifest
