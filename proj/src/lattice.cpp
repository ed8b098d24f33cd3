#include "maglat/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace maglat {

int distance(Site a, Site b) { return std::abs(a.x1 - b.x1) + std::abs(a.x2 - b.x2); }

namespace {

std::vector<Site> sorted_unique(std::vector<Site> v) {
    std::sort(v.begin(), v.end(), RowMajorLess{});
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

SiteSet SiteSet::box(int L) {
    if (L < 0) throw std::invalid_argument("box: L must be >= 0");
    std::vector<Site> s;
    s.reserve(static_cast<size_t>(2 * L + 1) * (2 * L + 1));
    for (int x2 = 0; x2 <= 2 * L; ++x2)
        for (int x1 = -L; x1 <= L; ++x1) s.push_back({x1, x2});
    SiteSet out;
    out.sites_ = std::move(s);
    out.kind_ = Kind::box;
    out.box_L_ = L;
    return out;
}

SiteSet SiteSet::centered_box(int L) {
    if (L < 0) throw std::invalid_argument("centered_box: L must be >= 0");
    std::vector<Site> s;
    for (int x2 = -L; x2 <= L; ++x2)
        for (int x1 = -L; x1 <= L; ++x1) s.push_back({x1, x2});
    SiteSet out;
    out.sites_ = std::move(s);
    out.kind_ = Kind::centered_box;
    out.box_L_ = L;
    return out;
}

SiteSet SiteSet::ball(Site c, int r) {
    if (r < 0) throw std::invalid_argument("ball: r must be >= 0");
    std::vector<Site> s;
    for (int x2 = c.x2 - r; x2 <= c.x2 + r; ++x2) {
        int w = r - std::abs(x2 - c.x2);
        for (int x1 = c.x1 - w; x1 <= c.x1 + w; ++x1) s.push_back({x1, x2});
    }
    SiteSet out;
    out.sites_ = std::move(s);
    out.kind_ = Kind::ball;
    return out;
}

SiteSet SiteSet::ball_in(Site c, int r, const SiteSet& S) {
    return ball(c, r).intersect(S);
}

SiteSet SiteSet::of(std::vector<Site> sites) {
    SiteSet out;
    out.sites_ = sorted_unique(std::move(sites));
    out.kind_ = Kind::custom;
    return out;
}

bool SiteSet::contains(Site s) const {
    return std::binary_search(sites_.begin(), sites_.end(), s, RowMajorLess{});
}

std::optional<int> SiteSet::rank(Site s) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), s, RowMajorLess{});
    if (it == sites_.end() || *it != s) return std::nullopt;
    return static_cast<int>(it - sites_.begin());
}

bool SiteSet::is_subset_of(const SiteSet& other) const {
    return std::includes(other.sites_.begin(), other.sites_.end(), sites_.begin(),
                         sites_.end(), RowMajorLess{});
}

SiteSet SiteSet::intersect(const SiteSet& other) const {
    std::vector<Site> s;
    std::set_intersection(sites_.begin(), sites_.end(), other.sites_.begin(),
                          other.sites_.end(), std::back_inserter(s), RowMajorLess{});
    return of(std::move(s));
}

SiteSet SiteSet::minus(const SiteSet& other) const {
    std::vector<Site> s;
    std::set_difference(sites_.begin(), sites_.end(), other.sites_.begin(),
                        other.sites_.end(), std::back_inserter(s), RowMajorLess{});
    return of(std::move(s));
}

std::optional<int> set_distance(const SiteSet& X, const SiteSet& Y) {
    if (X.empty()) throw std::invalid_argument("set_distance: X is empty");
    if (Y.empty()) return std::nullopt;
    int best = distance(X.sites().front(), Y.sites().front());
    for (auto x : X.sites())
        for (auto y : Y.sites()) best = std::min(best, distance(x, y));
    return best;
}

int distance_to_complement(Site x, const SiteSet& S) {
    if (!S.contains(x)) return 0;
    // the first diamond ring around x that leaves S; S is finite so this ends
    for (int r = 1;; ++r) {
        for (int d2 = -r; d2 <= r; ++d2) {
            int w = r - std::abs(d2);
            if (!S.contains({x.x1 - w, x.x2 + d2})) return r;
            if (w > 0 && !S.contains({x.x1 + w, x.x2 + d2})) return r;
        }
    }
}

int set_distance_to_complement(const SiteSet& X, const SiteSet& S) {
    if (X.empty())
        throw std::invalid_argument("set_distance_to_complement: X is empty");
    int best = distance_to_complement(X.sites().front(), S);
    for (auto x : X.sites()) best = std::min(best, distance_to_complement(x, S));
    return best;
}

Crossing classify_crossing(const DualEdge& e, Site x, Site y) {
    // doubled integers: lattice points even, the dual edge on odd lines
    const std::int64_t ux = 2 * (e.k == 1 ? x.x1 : x.x2);
    const std::int64_t uy = 2 * (e.k == 1 ? y.x1 : y.x2);
    const std::int64_t vx = 2 * (e.k == 1 ? x.x2 : x.x1);
    const std::int64_t vy = 2 * (e.k == 1 ? y.x2 : y.x1);
    const std::int64_t c = 2 * (e.k == 1 ? e.z.x1 : e.z.x2) + 1;   // crossing line
    const std::int64_t lo = 2 * (e.k == 1 ? e.z.x2 : e.z.x1) - 1;  // edge span
    const std::int64_t hi = lo + 2;

    const std::int64_t du = uy - ux;
    if (du == 0) return Crossing::none;  // parallel or degenerate
    if (!(std::min(ux, uy) < c && c < std::max(ux, uy))) return Crossing::none;

    // height of the intersection times du: h = num / du, compared exactly
    const std::int64_t num = vx * du + (c - ux) * (vy - vx);
    const std::int64_t s = du > 0 ? 1 : -1;
    const std::int64_t lo_diff = (num - lo * du) * s;  // sign of h - lo
    const std::int64_t hi_diff = (num - hi * du) * s;  // sign of h - hi
    if (lo_diff < 0 || hi_diff > 0) return Crossing::none;
    if (lo_diff == 0 || hi_diff == 0) return Crossing::endpoint;
    return Crossing::interior;
}

std::vector<SignedDualEdge> dual_edge_boundary(const SiteSet& Z,
                                               const SiteSet& ambient) {
    if (!Z.is_subset_of(ambient))
        throw std::invalid_argument("dual_edge_boundary: Z is not inside the ambient set");
    std::vector<SignedDualEdge> out;
    const Site steps[2] = {{1, 0}, {0, 1}};
    for (auto z : ambient.sites()) {
        const bool z_in = Z.contains(z);
        for (int k = 1; k <= 2; ++k) {
            Site w = z + steps[k - 1];
            if (!ambient.contains(w)) continue;
            if (z_in == Z.contains(w)) continue;
            out.push_back({DualEdge{k, z}, z_in ? -1 : +1});
        }
    }
    return out;
}

std::vector<DualEdge> vertical_dual_edges(int L) {
    std::vector<DualEdge> out;
    out.reserve(static_cast<size_t>(2 * L) * (2 * L + 1));
    for (int m = -L; m <= L - 1; ++m)
        for (int n = 0; n <= 2 * L; ++n) out.push_back({1, {m, n}});
    return out;
}

std::vector<DualEdge> horizontal_dual_edges(int L) {
    std::vector<DualEdge> out;
    out.reserve(static_cast<size_t>(2 * L + 1) * (2 * L));
    for (int m = -L; m <= L; ++m)
        for (int n = 0; n <= 2 * L - 1; ++n) out.push_back({2, {m, n}});
    return out;
}

FiveRegionMasks five_region_masks(int L, int d) {
    if (d < 1 || d > L)
        throw std::invalid_argument("five_region_masks: need 1 <= d <= L");
    FiveRegionMasks out;
    out.bulk.label = RegionMask::Label::bulk;
    out.left.label = RegionMask::Label::left;
    out.right.label = RegionMask::Label::right;
    out.bottom.label = RegionMask::Label::bottom;
    out.top.label = RegionMask::Label::top;
    for (const auto& e : vertical_dual_edges(L)) {
        const int m = e.z.x1, n = e.z.x2;
        if (m <= -L + d - 1)
            out.left.edges.push_back(e);
        else if (m >= L - d)
            out.right.edges.push_back(e);
        else if (n <= d - 1)
            out.bottom.edges.push_back(e);
        else if (n >= 2 * L - d + 1)
            out.top.edges.push_back(e);
        else
            out.bulk.edges.push_back(e);
    }
    return out;
}

}  // namespace maglat
