#include "svol/manifest.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>

namespace svol {

std::uint64_t fnv1a64_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& m) {
  nlohmann::json j;
  j["tool"] = "svol";
  j["version"] = kToolVersion;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["threads"] = m.threads;

  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  j["created_utc"] = buf;

  j["config"] = m.config;
  j["inputs"] = nlohmann::json::array();
  for (const auto& [path, digest] : m.inputs) {
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(digest));
    j["inputs"].push_back({{"path", path}, {"fnv1a64", hex}});
  }
  j["outputs"] = m.outputs;

  std::ofstream out(out_dir / "manifest.json");
  out << j.dump(2) << '\n';
}

}  // namespace svol
