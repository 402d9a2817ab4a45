#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace chainsim {

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64_file(const std::filesystem::path& file);

/// Writes manifest.json in dir listing the given files (paths relative to
/// dir) with their content digests. No timestamps, so a rerun that produces
/// identical outputs produces an identical manifest.
void write_manifest(const std::filesystem::path& dir, const std::vector<std::string>& files);

}  // namespace chainsim
