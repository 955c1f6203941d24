//  Copyright 2026 The placevec Authors. All Rights Reserved.
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.


#pragma once

// Run manifests: the resolved parameters of one subcommand plus digests of
// every input file, enough to re-run the stage.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace placevec {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr const char* kManifestName = "manifest.json";

/// Lowercase hex SHA-256 of a file's bytes. Throws std::runtime_error naming
/// the path if it cannot be read.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

struct ManifestInput {
  /// Path relative to the directory holding the manifest.
  std::string path;
  std::string sha256;
};

struct RunManifest {
  /// Space-separated command path, e.g. "analyze decay".
  std::string subcommand;
  /// Option name (without dashes) to its values, in the order given.
  std::map<std::string, std::vector<std::string>> params;
  /// Keyed by option name.
  std::map<std::string, ManifestInput> inputs;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Writes `dir/manifest.json` (sorted keys, two-space indent, trailing newline).
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& file);

/// `target` expressed relative to `base`, with forward slashes.
std::string relative_to(const std::filesystem::path& target, const std::filesystem::path& base);

}  // namespace placevec
