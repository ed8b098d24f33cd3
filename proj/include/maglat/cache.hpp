#pragma once

// Optional on-disk cache for heavy eigensolves, enabled by setting
// MAGLAT_CACHE_DIR. Blobs are raw little-endian doubles with a small header;
// reloads are bit exact. Keys must encode every input that determines the
// blob (content hashes plus a version tag).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace maglat {

std::uint64_t fnv1a(const void* data, std::size_t n,
                    std::uint64_t seed = 1469598103934665603ULL);
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ULL);

std::optional<std::filesystem::path> cache_dir();  // from the environment

bool cache_load(const std::string& key, std::vector<double>& out);
void cache_store(const std::string& key, const std::vector<double>& data);

}  // namespace maglat
