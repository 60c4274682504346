#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "uforge/models/model_spec.hpp"
#include "uforge/numcore/param_vector.hpp"

namespace uforge::harness {

enum class Role { original, retrain, forget_oracle, unlearned };

std::string to_string(Role r);
Role role_from_string(const std::string& s);

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// A model snapshot. On disk (`IEUC`):
///   "IEUC" | u32 version | u32 role | u64 len + spec JSON | u64 len + config JSON
///   | u64 root seed | u64 d | d x f64 theta | 32-byte SHA-256 of all preceding bytes
/// All integers and floats little-endian.
struct Checkpoint {
  Role role = Role::original;
  models::ModelSpec spec;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t root_seed = 0;
  ParamVector theta;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
/// Throws HashMismatchError when the trailing digest does not verify and
/// FormatError for any other malformed input.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(const std::string& text);
std::string file_sha256_hex(const std::filesystem::path& path);

/// First 16 hex digits of the checkpoint's content hash.
std::string checkpoint_id(const Checkpoint& ckpt);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace uforge::harness
