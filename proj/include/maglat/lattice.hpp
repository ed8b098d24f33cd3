#pragma once

// Finite subsets of Z^2 with the 1-metric, dual-lattice edges, boundary edge
// sets, and the five-region decomposition of the vertical dual edges.
//
// All dual-lattice geometry works in doubled integer coordinates (a lattice
// point x maps to 2x, a dual edge lives on odd coordinates), so every
// intersection decision is exact. No floating point enters this module.

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

namespace maglat {

struct Site {
    int x1 = 0;  // column
    int x2 = 0;  // row
    friend auto operator<=>(const Site&, const Site&) = default;
};

inline Site operator+(Site a, Site b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Site operator-(Site a, Site b) { return {a.x1 - b.x1, a.x2 - b.x2}; }

// 1-metric |a1-b1| + |a2-b2|
int distance(Site a, Site b);

// Ordering used everywhere a canonical site enumeration is needed (mode
// order, CSV rows): row-major, i.e. by (x2, x1) ascending.
struct RowMajorLess {
    bool operator()(Site a, Site b) const {
        return a.x2 != b.x2 ? a.x2 < b.x2 : a.x1 < b.x1;
    }
};

class SiteSet {
  public:
    enum class Kind { box, centered_box, ball, custom };

    SiteSet() = default;

    // Lambda_L = [-L,L] x [0,2L], the upper-half-plane box
    static SiteSet box(int L);
    // B_L = [-L,L]^2, the centered box
    static SiteSet centered_box(int L);
    // B^c(r), all sites within 1-distance r of c
    static SiteSet ball(Site c, int r);
    // B^c_S(r) = B^c(r) intersected with S
    static SiteSet ball_in(Site c, int r, const SiteSet& S);
    static SiteSet of(std::vector<Site> sites);  // custom, duplicates removed

    const std::vector<Site>& sites() const { return sites_; }  // row-major sorted
    std::size_t size() const { return sites_.size(); }
    bool empty() const { return sites_.empty(); }
    bool contains(Site s) const;
    // position of s in the row-major enumeration
    std::optional<int> rank(Site s) const;
    Kind kind() const { return kind_; }
    // box side parameter when kind is box/centered_box
    std::optional<int> box_L() const { return box_L_; }

    bool is_subset_of(const SiteSet& other) const;
    SiteSet intersect(const SiteSet& other) const;
    SiteSet minus(const SiteSet& other) const;

    friend bool operator==(const SiteSet& a, const SiteSet& b) {
        return a.sites_ == b.sites_;
    }

  private:
    std::vector<Site> sites_;
    Kind kind_ = Kind::custom;
    std::optional<int> box_L_;
};

// min over pairs of distance(x,y); nullopt = infinity marker (empty Y).
// Throws std::invalid_argument on empty X.
std::optional<int> set_distance(const SiteSet& X, const SiteSet& Y);

// dist(x, Z^2 \ S) for finite S: smallest r with some site at distance r
// outside S. Always >= 1 for x in S; equals 0 for x outside S.
int distance_to_complement(Site x, const SiteSet& S);
// min over x in X; X must be nonempty
int set_distance_to_complement(const SiteSet& X, const SiteSet& S);

// Dual edge e_{k,z}: crosses the lattice bond z <-> z+e_k. Realized as the
// open segment from (z1+1/2, z2-1/2) to (z1+1/2, z2+1/2) for k=1 and the
// horizontal analogue for k=2; the closed version includes both endpoints.
struct DualEdge {
    int k = 1;  // 1 = vertical dual edge (horizontal bond), 2 = horizontal
    Site z;
    friend auto operator<=>(const DualEdge&, const DualEdge&) = default;
};

// How the closed segment x--y meets the closed dual edge. Decided exactly in
// doubled integers. Segments parallel to the dual edge never meet it (lattice
// points have even doubled coordinates, the dual edge lives on odd ones).
enum class Crossing { none, interior, endpoint };
Crossing classify_crossing(const DualEdge& e, Site x, Site y);

struct SignedDualEdge {
    DualEdge e;
    int sign;  // -1 when the base z lies in Z, +1 otherwise
};

// The dual-edge boundary of Z inside ambient: all (k,z) whose bond
// z <-> z+e_k has exactly one endpoint in Z (both endpoints in ambient),
// with sign (-1)^{1 if z in Z}. Throws if Z is not a subset of ambient.
std::vector<SignedDualEdge> dual_edge_boundary(const SiteSet& Z,
                                               const SiteSet& ambient);

// All vertical dual edges of the box Lambda_L: bases (m,n) with
// -L <= m <= L-1, 0 <= n <= 2L. Row order: m ascending, then n.
std::vector<DualEdge> vertical_dual_edges(int L);
// Horizontal dual edges: bases (m,n) with -L <= m <= L, 0 <= n <= 2L-1.
std::vector<DualEdge> horizontal_dual_edges(int L);

struct RegionMask {
    enum class Label { bulk, left, right, bottom, top };
    Label label;
    std::vector<DualEdge> edges;
};

struct FiveRegionMasks {
    RegionMask bulk, left, right, bottom, top;
};

// Partition of the vertical dual edges of Lambda_L into the five index
// ranges of the magnetization decomposition:
//   left    m in [-L, -L+d-1],   n in [0, 2L]
//   right   m in [L-d, L-1],     n in [0, 2L]
//   bottom  m in [-L+d, L-d-1],  n in [0, d-1]
//   bulk    m in [-L+d, L-d-1],  n in [d, 2L-d]
//   top     m in [-L+d, L-d-1],  n in [2L-d+1, 2L]
// Pure geometry: requires 1 <= d <= L (throws std::invalid_argument
// otherwise); the model-aware feasibility check d > D+R belongs to callers.
FiveRegionMasks five_region_masks(int L, int d);

}  // namespace maglat
