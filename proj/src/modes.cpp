#include "maglat/modes.hpp"

#include <stdexcept>
#include <string>

namespace maglat {

namespace {

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
        h ^= (v >> (8 * byte)) & 0xffu;
        h *= 1099511628211ULL;
    }
}

}  // namespace

ModeIndex::ModeIndex(SiteSet region, int s) : region_(std::move(region)), s_(s) {
    if (s < 1) throw std::invalid_argument("ModeIndex: s must be >= 1");
}

int ModeIndex::mode(Site x, int j) const {
    auto m = try_mode(x, j);
    if (!m)
        throw std::invalid_argument("ModeIndex: no mode at (" + std::to_string(x.x1) +
                                    "," + std::to_string(x.x2) + ") j=" +
                                    std::to_string(j));
    return *m;
}

std::optional<int> ModeIndex::try_mode(Site x, int j) const {
    if (j < 0 || j >= s_) return std::nullopt;
    auto r = region_.rank(x);
    if (!r) return std::nullopt;
    return *r * s_ + j;
}

std::pair<Site, int> ModeIndex::site_of(int mode) const {
    if (mode < 0 || mode >= M())
        throw std::invalid_argument("ModeIndex: mode " + std::to_string(mode) +
                                    " out of range");
    return {region_.sites()[static_cast<size_t>(mode / s_)], mode % s_};
}

bool ModeIndex::operator==(const ModeIndex& o) const {
    return s_ == o.s_ && region_ == o.region_;
}

std::uint64_t ModeIndex::content_hash() const {
    std::uint64_t h = 14695981039346656037ULL;
    fnv_mix(h, static_cast<std::uint64_t>(s_));
    fnv_mix(h, static_cast<std::uint64_t>(region_.size()));
    for (auto s : region_.sites()) {
        fnv_mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(s.x1)));
        fnv_mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(s.x2)));
    }
    return h;
}

}  // namespace maglat
