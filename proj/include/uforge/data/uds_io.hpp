#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uforge/data/dataset.hpp"

namespace uforge::data {

/// `.uds` layout:
///   bytes 0..3   magic "UDS1"
///   bytes 4..11  u64 little-endian header length H
///   next H bytes JSON header (schema_version, shapes, dtype "f64le",
///                label_dtype, provenance, splits)
///   n*p float64 little-endian features, row-major
///   n labels: int32 little-endian (classification) or float64 (regression)
inline constexpr int kUdsSchemaVersion = 1;

std::vector<std::uint8_t> encode_uds(const SplitDataset& ds);
SplitDataset decode_uds(const std::vector<std::uint8_t>& bytes);

void save_uds(const std::filesystem::path& path, const SplitDataset& ds);
SplitDataset load_uds(const std::filesystem::path& path);

}  // namespace uforge::data
