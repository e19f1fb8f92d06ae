#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace svol {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit content fingerprint (not cryptographic; manifest bookkeeping).
std::uint64_t fnv1a64_file(const std::filesystem::path& file);

/// Run provenance written once per output directory as manifest.json. The
/// timestamp makes manifests run-specific; all numeric artifacts stay
/// bit-identical for identical seeded invocations.
struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  int threads = 0;
  std::map<std::string, std::string> config;
  std::vector<std::pair<std::string, std::uint64_t>> inputs;  // path, digest
  std::vector<std::string> outputs;
};

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& m);

}  // namespace svol
