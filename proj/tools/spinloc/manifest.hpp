#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spinloc/constants.hpp"

namespace spinloc::cli {

using ordered_json = nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view data);
std::string hash_hex(std::string_view data);

struct Artifact {
  std::string name;  // relative to the output directory
  std::string content;
};

struct RunRecord {
  std::string subcommand;
  std::string config_text;
  ConstantsTable constants;
  ordered_json resolved = ordered_json::object();
  std::vector<std::pair<std::string, std::string>> inputs;  // (path as given, content)
  std::vector<Artifact> outputs;
};

/// Run manifest: resolved config and its hash, constants, input and output
/// hashes, library versions. Contains no timestamps or absolute paths, so a
/// rerun of the same config writes the same bytes.
std::string manifest_json(const RunRecord& record);

/// The config text stored in a manifest, or nullopt-equivalent empty string
/// when `text` is not a manifest.
std::string config_from_manifest(std::string_view text);

}  // namespace spinloc::cli
