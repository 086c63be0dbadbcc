// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opinion/common.hpp"
#include "opinion/hash.hpp"
#include "opinion/timeutil.hpp"

namespace opinion {

/// Per-stage run manifest: every input and output file with its content
/// hash, plus the config hash and seed. created_utc is the only field that
/// varies between identical reruns.
inline nlohmann::json write_manifest(const std::filesystem::path& out_dir, const std::string& stage,
                                     const std::vector<std::filesystem::path>& inputs,
                                     const std::vector<std::filesystem::path>& outputs,
                                     const std::string& config_hash, uint64_t seed,
                                     const nlohmann::json& stats = nlohmann::json::object()) {
  nlohmann::json manifest;
  manifest["stage"] = stage;
  manifest["version"] = kVersion;
  manifest["created_utc"] = format_utc(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  manifest["config_hash"] = config_hash;
  manifest["seed"] = seed;
  auto hash_list = [](const std::vector<std::filesystem::path>& paths) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : paths)
      arr.push_back({{"path", p.filename().string()}, {"sha256", sha256_file_hex(p)}});
    return arr;
  };
  manifest["inputs"] = hash_list(inputs);
  manifest["outputs"] = hash_list(outputs);
  manifest["stats"] = stats;
  write_file(out_dir / ("manifest-" + stage + ".json"), manifest.dump(2) + "\n");
  return manifest;
}

struct ManifestIssue {
  std::string stage;
  std::string path;
  std::string problem;  // "missing" or "hash-mismatch"
};

/// Re-validates every manifest in the directory against the files on disk.
inline std::vector<ManifestIssue> verify_manifests(const std::filesystem::path& out_dir) {
  std::vector<ManifestIssue> issues;
  std::vector<std::filesystem::path> manifests;
  for (const auto& entry : std::filesystem::directory_iterator(out_dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("manifest-", 0) == 0 && name.ends_with(".json"))
      manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());
  for (const auto& mpath : manifests) {
    nlohmann::json m = nlohmann::json::parse(read_file(mpath), nullptr, false);
    if (m.is_discarded()) {
      issues.push_back({mpath.filename().string(), mpath.filename().string(), "unreadable"});
      continue;
    }
    std::string stage = m.value("stage", "?");
    for (const auto& rec : m.value("outputs", nlohmann::json::array())) {
      std::filesystem::path p = out_dir / rec.value("path", "");
      if (!std::filesystem::exists(p)) {
        issues.push_back({stage, rec.value("path", ""), "missing"});
        continue;
      }
      if (sha256_file_hex(p) != rec.value("sha256", ""))
        issues.push_back({stage, rec.value("path", ""), "hash-mismatch"});
    }
  }
  return issues;
}

}  // namespace opinion
