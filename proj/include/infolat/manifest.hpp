#pragma once

// Run manifests: tool version, config echo, timings and a SHA-256 checksum for
// every emitted file. Needs OpenSSL (libcrypto).

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "infolat/io.hpp"
#include "infolat/version.hpp"

namespace infolat::io {

inline std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int k = 0; k < length; ++k) hex += fmt::format("{:02x}", digest[k]);
  return hex;
}

inline std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

struct Manifest {
  std::string command;
  json config = nullptr;  ///< config echo, null when the command has none
  double wall_seconds = 0.0;
  int workers = 1;
  json timings = json::object();
  std::vector<std::string> files;  ///< names relative to the output directory
};

/// Writes manifest.json into `dir`, checksumming every listed file.
inline void write_manifest(const Manifest& m, const fs::path& dir) {
  json j;
  j["tool"] = "infolat";
  j["version"] = version;
  j["command"] = m.command;
  j["config"] = m.config;
  j["wall_seconds"] = round12(m.wall_seconds);
  j["workers"] = m.workers;
  j["timings"] = m.timings;
  json files = json::array();
  for (const auto& name : m.files) {
    const std::string bytes = read_file(dir / name);
    files.push_back({{"name", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  }
  j["files"] = files;
  write_text(dir / "manifest.json", j.dump(1) + "\n");
}

inline json read_manifest(const fs::path& dir) {
  try {
    return json::parse(read_file(dir / "manifest.json"));
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("manifest.json in '{}' is not valid JSON: {}", dir.string(), e.what()));
  }
}

}  // namespace infolat::io
