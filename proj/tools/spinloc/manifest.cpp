#include "manifest.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>

#include "spinloc/rng.hpp"

#ifndef SPINLOC_VERSION
#define SPINLOC_VERSION "unknown"
#endif

namespace spinloc::cli {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::string_view data) { return fmt::format("{:016x}", fnv1a64(data)); }

std::string manifest_json(const RunRecord& r) {
  ordered_json j;
  j["tool"] = "spinloc";
  j["version"] = SPINLOC_VERSION;
  j["subcommand"] = r.subcommand;
  j["config"] = r.config_text;
  j["config_hash_fnv1a64"] = hash_hex(r.config_text);
  j["resolved"] = r.resolved;
  j["constants"] = ordered_json::parse(constants_to_json(r.constants));
  auto& inputs = j["inputs"] = ordered_json::array();
  for (const auto& [path, content] : r.inputs) {
    ordered_json e;
    e["path"] = path;
    e["bytes"] = content.size();
    e["fnv1a64"] = hash_hex(content);
    inputs.push_back(std::move(e));
  }
  auto& outputs = j["outputs"] = ordered_json::array();
  for (const auto& a : r.outputs) {
    ordered_json e;
    e["file"] = a.name;
    e["bytes"] = a.content.size();
    e["fnv1a64"] = hash_hex(a.content);
    outputs.push_back(std::move(e));
  }
  auto& v = j["versions"];
  v["spinloc"] = SPINLOC_VERSION;
  v["eigen"] = fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  v["fmt"] = fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100);
  v["nlohmann_json"] = fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                   NLOHMANN_JSON_VERSION_PATCH);
  v["cli11"] = CLI11_VERSION;
#if defined(__clang__)
  v["compiler"] = fmt::format("clang {}", __clang_version__);
#elif defined(__GNUC__)
  v["compiler"] = fmt::format("gcc {}", __VERSION__);
#else
  v["compiler"] = "unknown";
#endif
  j["rng_algorithm"] = std::string(Rng::kAlgorithm);
  return j.dump(2) + "\n";
}

std::string config_from_manifest(std::string_view text) {
  const auto j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("config") || !j["config"].is_string()) return {};
  return j["config"].get<std::string>();
}

}  // namespace spinloc::cli
