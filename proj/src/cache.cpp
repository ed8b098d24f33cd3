#include "maglat/cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace maglat {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
    return fnv1a(s.data(), s.size(), seed);
}

std::optional<std::filesystem::path> cache_dir() {
    const char* dir = std::getenv("MAGLAT_CACHE_DIR");
    if (!dir || !*dir) return std::nullopt;
    return std::filesystem::path(dir);
}

namespace {

constexpr char kMagic[8] = {'M', 'G', 'L', 'T', 'B', 'L', 'B', '1'};

std::filesystem::path blob_path(const std::filesystem::path& dir, const std::string& key) {
    char name[32];
    std::snprintf(name, sizeof(name), "%016llx.blob",
                  static_cast<unsigned long long>(fnv1a(key)));
    return dir / name;
}

}  // namespace

bool cache_load(const std::string& key, std::vector<double>& out) {
    auto dir = cache_dir();
    if (!dir) return false;
    std::FILE* f = std::fopen(blob_path(*dir, key).c_str(), "rb");
    if (!f) return false;
    char magic[8];
    std::uint64_t count = 0;
    bool ok = std::fread(magic, 1, 8, f) == 8 &&
              std::memcmp(magic, kMagic, 8) == 0 &&
              std::fread(&count, sizeof(count), 1, f) == 1;
    if (ok) {
        out.resize(count);
        ok = count == 0 || std::fread(out.data(), sizeof(double), count, f) == count;
    }
    std::fclose(f);
    if (!ok) out.clear();
    return ok;
}

void cache_store(const std::string& key, const std::vector<double>& data) {
    auto dir = cache_dir();
    if (!dir) return;
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    const auto final_path = blob_path(*dir, key);
    const auto tmp_path = final_path.string() + ".tmp";
    std::FILE* f = std::fopen(tmp_path.c_str(), "wb");
    if (!f) return;
    const std::uint64_t count = data.size();
    bool ok = std::fwrite(kMagic, 1, 8, f) == 8 &&
              std::fwrite(&count, sizeof(count), 1, f) == 1 &&
              (count == 0 || std::fwrite(data.data(), sizeof(double), count, f) == count);
    ok = (std::fclose(f) == 0) && ok;
    if (ok)
        std::filesystem::rename(tmp_path, final_path, ec);
    else
        std::filesystem::remove(tmp_path, ec);
}

}  // namespace maglat
