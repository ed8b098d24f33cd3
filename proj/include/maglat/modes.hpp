#pragma once

// Flattening of (site, internal index) pairs to a contiguous mode index.
// Sites are ordered row-major (x2 ascending, then x1), internal index fastest.
// This order is frozen: Jordan-Wigner strings, one-body matrices, and the
// translation covariance checks all assume it.

#include "maglat/lattice.hpp"

#include <cstdint>
#include <memory>
#include <optional>

namespace maglat {

class ModeIndex {
  public:
    ModeIndex(SiteSet region, int s);

    int M() const { return static_cast<int>(region_.size()) * s_; }
    int s() const { return s_; }
    const SiteSet& region() const { return region_; }

    int mode(Site x, int j) const;  // throws on out-of-region / bad j
    std::optional<int> try_mode(Site x, int j) const;
    std::pair<Site, int> site_of(int mode) const;

    bool operator==(const ModeIndex& o) const;

    // FNV-1a over (s, site list); stable across runs, used as a cache key part
    std::uint64_t content_hash() const;

  private:
    SiteSet region_;
    int s_;
};

using ModesPtr = std::shared_ptr<const ModeIndex>;

}  // namespace maglat
