#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace uforge::harness {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kRunsDirEnv = "UNLEARN_FORGE_RUNS_DIR";

/// $UNLEARN_FORGE_RUNS_DIR when set and non-empty, otherwise ./runs.
std::filesystem::path runs_root();

/// First 16 hex digits of sha256(command, resolved config, seed).
std::string experiment_id(const std::string& command, const nlohmann::json& config, std::uint64_t seed);

struct ArtifactRef {
  std::string path;
  std::string sha256;
};

ArtifactRef artifact_ref(const std::filesystem::path& path);

struct RunManifest {
  std::string experiment_id;
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<ArtifactRef> inputs;
  std::vector<ArtifactRef> outputs;
  std::string tool_version = kToolVersion;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Run directory with checkpoints/, reports/ and traces/ created.
std::filesystem::path prepare_run_dir(const std::filesystem::path& root, const std::string& id);

/// Writes <run_dir>/manifest.json after checking every artifact.
void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m);

/// Throws MissingArtifactError or HashMismatchError for the first artifact
/// that is absent or whose content changed.
void verify_manifest(const RunManifest& m);

/// Forget-set reference values keyed by a hash of everything that determines
/// them, stored under <root>/cache/phi_ref/.
std::optional<nlohmann::json> load_cached(const std::filesystem::path& root, const std::string& key);
void store_cached(const std::filesystem::path& root, const std::string& key, const nlohmann::json& value);

}  // namespace uforge::harness
