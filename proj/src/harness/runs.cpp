#include "uforge/harness/runs.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "uforge/harness/checkpoint.hpp"
#include "uforge/numcore/error.hpp"

namespace uforge::harness {

namespace fs = std::filesystem;

fs::path runs_root() {
  const char* env = std::getenv(kRunsDirEnv);
  if (env != nullptr && *env != '\0') return fs::path(env);
  return fs::path("runs");
}

std::string experiment_id(const std::string& command, const nlohmann::json& config, std::uint64_t seed) {
  const nlohmann::json key = {{"command", command}, {"config", config}, {"seed", seed}};
  return sha256_hex(key.dump()).substr(0, 16);
}

ArtifactRef artifact_ref(const fs::path& path) { return {path.string(), file_sha256_hex(path)}; }

nlohmann::json to_json(const RunManifest& m) {
  auto refs = [](const std::vector<ArtifactRef>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& a : v) out.push_back({{"path", a.path}, {"sha256", a.sha256}});
    return out;
  };
  return {{"experiment_id", m.experiment_id},
          {"command", m.command},
          {"seed", m.seed},
          {"config", m.config},
          {"inputs", refs(m.inputs)},
          {"outputs", refs(m.outputs)},
          {"tool_version", m.tool_version},
          {"timing", {{"wall_seconds", m.wall_seconds}}}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.experiment_id = j.at("experiment_id").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.at("config");
    for (const auto& a : j.at("inputs")) m.inputs.push_back({a.at("path"), a.at("sha256")});
    for (const auto& a : j.at("outputs")) m.outputs.push_back({a.at("path"), a.at("sha256")});
    m.tool_version = j.at("tool_version").get<std::string>();
    m.wall_seconds = j.at("timing").at("wall_seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

fs::path prepare_run_dir(const fs::path& root, const std::string& id) {
  const fs::path dir = root / id;
  for (const char* sub : {"checkpoints", "reports", "traces"}) fs::create_directories(dir / sub);
  return dir;
}

void verify_manifest(const RunManifest& m) {
  for (const auto* list : {&m.inputs, &m.outputs}) {
    for (const ArtifactRef& a : *list) {
      if (!fs::exists(a.path)) throw MissingArtifactError("manifest artifact not found: " + a.path);
      if (file_sha256_hex(a.path) != a.sha256) throw HashMismatchError("manifest artifact changed: " + a.path);
    }
  }
}

void write_manifest(const fs::path& run_dir, const RunManifest& m) {
  verify_manifest(m);
  write_text(run_dir / "manifest.json", to_json(m).dump(2) + "\n");
}

std::optional<nlohmann::json> load_cached(const fs::path& root, const std::string& key) {
  const fs::path p = root / "cache" / "phi_ref" / (key + ".json");
  std::ifstream in(p);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void store_cached(const fs::path& root, const std::string& key, const nlohmann::json& value) {
  write_text(root / "cache" / "phi_ref" / (key + ".json"), value.dump(2) + "\n");
}

}  // namespace uforge::harness
