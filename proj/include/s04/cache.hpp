// Content-addressed result cache: one file per result, named by the SHA-256
// of the canonical request. Entries store the exact bytes that were emitted,
// so a hit reproduces the original output; purging any subset of files only
// costs recomputation. Writes go through a temp file and an atomic rename so
// concurrent processes can share a directory.

#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "s04/sha256.hpp"

namespace s04 {

inline const char* kCacheEnvVar = "S04_CACHE_DIR";

class ResultCache {
 public:
  // Explicit directory beats the environment variable; with neither, the
  // cache is disabled and load/store are no-ops.
  static ResultCache resolve(const std::optional<std::string>& flag_dir) {
    ResultCache c;
    if (flag_dir && !flag_dir->empty()) c.dir_ = *flag_dir;
    else if (const char* env = std::getenv(kCacheEnvVar); env && *env)
      c.dir_ = env;
    return c;
  }

  bool enabled() const { return dir_.has_value(); }
  const std::optional<std::filesystem::path>& directory() const { return dir_; }

  static std::string key_of(const std::string& canonical_request) {
    return sha256_hex(canonical_request);
  }

  std::optional<std::string> load(const std::string& key) const {
    if (!dir_) return std::nullopt;
    std::ifstream in(*dir_ / (key + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) return std::nullopt;
    return data;
  }

  void store(const std::string& key, const std::string& payload) const {
    if (!dir_) return;
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) return;  // caching is best-effort
    std::filesystem::path target = *dir_ / (key + ".json");
    std::filesystem::path tmp =
        *dir_ / (key + ".tmp." + std::to_string(::getpid()));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) return;
      out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
      if (!out.good()) {
        out.close();
        std::filesystem::remove(tmp, ec);
        return;
      }
    }
    std::filesystem::rename(tmp, target, ec);
    if (ec) std::filesystem::remove(tmp, ec);
  }

 private:
  std::optional<std::filesystem::path> dir_;
};

}  // namespace s04
