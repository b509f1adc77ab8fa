// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "romdiff/param_map.hpp"

namespace romdiff {

using json = nlohmann::json;

/// FNV-1a 64-bit hash, used for config fingerprints and store checksums.
std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string fnv1a64_hex(const void* data, std::size_t size);

/// Hash of the canonicalized (key-sorted, minified) JSON text.
std::string canonical_hash(const json& doc);

/// Parses a model configuration document. Unknown keys are rejected.
Model model_from_json(const json& doc);
Model load_model(const std::filesystem::path& path);

/// Parse helper: reads and parses a JSON file, wrapping parse failures in
/// ConfigError with position diagnostics.
json parse_json_file(const std::filesystem::path& path);

/// Rejects keys outside `allowed`, reporting the json-pointer-ish context.
void require_keys(const json& object, const std::vector<std::string>& allowed,
                  const std::string& context);

}  // namespace romdiff
