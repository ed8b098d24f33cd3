#include "maglat/model.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace maglat {

cplx peierls_phase(double b, Site x, Site y) {
    return std::polar(1.0, b * 0.5 * (x.x2 + y.x2) * (x.x1 - y.x1));
}

namespace {

double operator_norm(const MatC& T) {
    if (T.size() == 0) return 0.0;
    Eigen::JacobiSVD<MatC> svd(T);
    return svd.singularValues()(0);
}

bool nonzero_matrix(const MatC& T) { return T.size() != 0 && T.cwiseAbs().maxCoeff() > 0.0; }

std::string site_str(Site s) {
    std::ostringstream os;
    os << "(" << s.x1 << "," << s.x2 << ")";
    return os.str();
}

}  // namespace

// --- HoppingMap ---

void HoppingMap::set_displacement(Site d, const MatC& T) {
    by_displacement_[d] = T;
    if (d != Site{0, 0}) by_displacement_[Site{0, 0} - d] = T.adjoint();
}

void HoppingMap::set_pair(Site x, Site y, const MatC& T) {
    by_pair_[{x, y}] = T;
    if (!(x == y)) by_pair_[{y, x}] = T.adjoint();
}

MatC HoppingMap::amplitude(Site x, Site y) const {
    MatC out = MatC::Zero(s_, s_);
    if (auto it = by_displacement_.find(x - y); it != by_displacement_.end())
        out += it->second;
    if (auto it = by_pair_.find({x, y}); it != by_pair_.end()) out += it->second;
    return out;
}

bool HoppingMap::nonzero(Site x, Site y) const { return nonzero_matrix(amplitude(x, y)); }

double HoppingMap::max_amplitude_norm() const {
    double best = 0.0;
    for (const auto& [d, T] : by_displacement_) best = std::max(best, operator_norm(T));
    for (const auto& [xy, T] : by_pair_) best = std::max(best, operator_norm(T));
    return best;
}

void HoppingMap::validate() const {
    auto check_shape = [&](const MatC& T, const std::string& where) {
        if (T.rows() != s_ || T.cols() != s_)
            throw ValidationError("hopping matrix at " + where + " is " +
                                  std::to_string(T.rows()) + "x" +
                                  std::to_string(T.cols()) + ", expected " +
                                  std::to_string(s_) + "x" + std::to_string(s_));
    };
    for (const auto& [d, T] : by_displacement_) {
        check_shape(T, "displacement " + site_str(d));
        if (std::abs(d.x1) + std::abs(d.x2) > R_)
            throw ValidationError("hopping displacement " + site_str(d) +
                                  " exceeds range " + std::to_string(R_));
        auto mirror = by_displacement_.find(Site{0, 0} - d);
        if (mirror == by_displacement_.end() ||
            (mirror->second - T.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw ValidationError("hopping displacement " + site_str(d) +
                                  " lacks its adjoint partner");
    }
    for (const auto& [xy, T] : by_pair_) {
        check_shape(T, "pair " + site_str(xy.first) + site_str(xy.second));
        if (distance(xy.first, xy.second) > R_)
            throw ValidationError("hopping pair " + site_str(xy.first) +
                                  site_str(xy.second) + " exceeds range " +
                                  std::to_string(R_));
        auto mirror = by_pair_.find({xy.second, xy.first});
        if (mirror == by_pair_.end() ||
            (mirror->second - T.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw ValidationError("hopping pair " + site_str(xy.first) +
                                  site_str(xy.second) + " lacks its adjoint partner");
    }
}

// --- interactions ---

int NumberMonomial::diameter() const {
    int d = 0;
    for (const auto& [x, jx] : modes)
        for (const auto& [y, jy] : modes) d = std::max(d, distance(x, y));
    return d;
}

// --- TranslationMap ---

cplx TranslationMap::phase(Site x) const { return std::polar(1.0, b * y.x2 * x.x1); }

// --- ModelSpec ---

int ModelSpec::range() const {
    int r = 0;
    for (const auto& [d, T] : bulk_hopping.displacement_terms())
        if (nonzero_matrix(T)) r = std::max(r, std::abs(d.x1) + std::abs(d.x2));
    for (const auto& [xy, T] : edge_hopping.pair_terms())
        if (nonzero_matrix(T)) r = std::max(r, distance(xy.first, xy.second));
    for (const auto& t : bulk_interaction.terms()) r = std::max(r, t.diameter());
    for (const auto& t : edge_interaction.terms()) r = std::max(r, t.diameter());
    return r;
}

void ModelSpec::validate() const {
    if (s < 1) throw ValidationError("internal dimension s must be >= 1");
    if (D < 1) throw ValidationError("edge width D must be >= 1");
    if (bulk_hopping.internal_dim() != s || edge_hopping.internal_dim() != s)
        throw ValidationError("hopping internal dimension differs from the model's s");
    bulk_hopping.validate();
    edge_hopping.validate();
    if (D < range())
        throw ValidationError("edge width D = " + std::to_string(D) +
                              " is smaller than the model range " +
                              std::to_string(range()));
    auto check_monomial = [&](const NumberMonomial& t, bool absolute) {
        if (t.modes.empty())
            throw ValidationError("interaction monomial with empty support");
        for (const auto& [x, j] : t.modes) {
            if (j < 0 || j >= s)
                throw ValidationError("interaction internal index " + std::to_string(j) +
                                      " out of range for s = " + std::to_string(s));
            if (absolute && !region.contains(x))
                throw ValidationError("edge interaction site " + site_str(x) +
                                      " is outside the region");
        }
        if (absolute) {
            int depth = region.size() ? 2 * static_cast<int>(region.size()) : 0;
            for (const auto& [x, j] : t.modes)
                depth = std::min(depth, distance_to_complement(x, region));
            if (depth > D)
                throw ValidationError("edge interaction at " + site_str(t.modes[0].first) +
                                      " sits " + std::to_string(depth) +
                                      " deep, beyond the edge width " + std::to_string(D));
        }
    };
    for (const auto& t : bulk_interaction.terms()) check_monomial(t, false);
    for (const auto& t : edge_interaction.terms()) check_monomial(t, true);
    for (const auto& [xy, T] : edge_hopping.pair_terms()) {
        if (!nonzero_matrix(T)) continue;
        if (!region.contains(xy.first) || !region.contains(xy.second))
            throw ValidationError("edge hopping pair " + site_str(xy.first) +
                                  site_str(xy.second) + " leaves the region");
        int depth = std::min(distance_to_complement(xy.first, region),
                             distance_to_complement(xy.second, region));
        if (depth > D)
            throw ValidationError("edge hopping pair " + site_str(xy.first) +
                                  site_str(xy.second) + " sits deeper than D");
    }
}

MatC ModelSpec::hopping_amplitude(Site x, Site y) const {
    return bulk_hopping.amplitude(x, y) + edge_hopping.amplitude(x, y);
}

bool ModelSpec::has_hopping(Site x, Site y) const {
    return nonzero_matrix(hopping_amplitude(x, y));
}

MatC ModelSpec::peierls(Site x, Site y) const {
    return peierls_phase(b, x, y) * hopping_amplitude(x, y);
}

std::vector<std::pair<Site, Site>> ModelSpec::hopping_pairs() const {
    std::set<std::pair<Site, Site>> seen;
    for (auto x : region.sites()) {
        for (const auto& [d, T] : bulk_hopping.displacement_terms()) {
            Site y = x - d;
            if (region.contains(y) && has_hopping(x, y)) seen.insert({x, y});
        }
    }
    for (const auto& [xy, T] : edge_hopping.pair_terms()) {
        if (region.contains(xy.first) && region.contains(xy.second) &&
            has_hopping(xy.first, xy.second))
            seen.insert(xy);
    }
    std::vector<std::pair<Site, Site>> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        RowMajorLess less;
        if (a.first != b.first) return less(a.first, b.first);
        return less(a.second, b.second);
    });
    return out;
}

std::vector<NumberMonomial> ModelSpec::instantiated_interactions() const {
    std::vector<NumberMonomial> out;
    for (auto anchor : region.sites()) {
        for (const auto& t : bulk_interaction.terms()) {
            bool fits = true;
            NumberMonomial inst;
            inst.coef = t.coef;
            for (const auto& [off, j] : t.modes) {
                Site x = anchor + off;
                if (!region.contains(x)) {
                    fits = false;
                    break;
                }
                inst.modes.push_back({x, j});
            }
            if (fits) out.push_back(std::move(inst));
        }
    }
    for (const auto& t : edge_interaction.terms()) out.push_back(t);
    return out;
}

bool ModelSpec::quadratic() const {
    for (const auto& t : instantiated_interactions())
        if (t.degree() > 1) return false;
    return true;
}

MatC peierls_element(const HoppingMap& T, double b, Site x, Site y) {
    return peierls_phase(b, x, y) * T.amplitude(x, y);
}

// --- presets ---

ModelSpec hofstadter_hubbard(int L, double b, double U) {
    ModelSpec m;
    m.region = SiteSet::box(L);
    m.b = b;
    m.s = 2;
    m.D = 1;
    m.bulk_hopping = HoppingMap(1, 2);
    m.edge_hopping = HoppingMap(1, 2);
    m.bulk_hopping.set_displacement({1, 0}, MatC::Identity(2, 2));
    m.bulk_hopping.set_displacement({0, 1}, MatC::Identity(2, 2));
    if (U != 0.0) m.bulk_interaction.add({{{{0, 0}, 0}, {{0, 0}, 1}}, U});
    m.validate();
    return m;
}

ModelSpec hofstadter(int L, double b) {
    ModelSpec m;
    m.region = SiteSet::box(L);
    m.b = b;
    m.s = 1;
    m.D = 1;
    m.bulk_hopping = HoppingMap(1, 1);
    m.edge_hopping = HoppingMap(1, 1);
    m.bulk_hopping.set_displacement({1, 0}, MatC::Constant(1, 1, 1.0));
    m.bulk_hopping.set_displacement({0, 1}, MatC::Constant(1, 1, 1.0));
    m.validate();
    return m;
}

ModelSpec spinless_tv(int L, double b, double t, double V) {
    ModelSpec m;
    m.region = SiteSet::box(L);
    m.b = b;
    m.s = 1;
    m.D = 1;
    m.bulk_hopping = HoppingMap(1, 1);
    m.edge_hopping = HoppingMap(1, 1);
    m.bulk_hopping.set_displacement({1, 0}, MatC::Constant(1, 1, t));
    m.bulk_hopping.set_displacement({0, 1}, MatC::Constant(1, 1, t));
    if (V != 0.0) {
        m.bulk_interaction.add({{{{0, 0}, 0}, {{1, 0}, 0}}, V});
        m.bulk_interaction.add({{{{0, 0}, 0}, {{0, 1}, 0}}, V});
    }
    m.validate();
    return m;
}

// --- operations ---

ModelSpec restrict_to(const ModelSpec& spec, const SiteSet& sub) {
    if (!sub.is_subset_of(spec.region))
        throw ValidationError("restrict_to: sub is not a subset of the region");
    ModelSpec out = spec;
    out.region = sub;
    out.edge_hopping = HoppingMap(spec.edge_hopping.range(), spec.s);
    std::set<std::pair<Site, Site>> kept;
    for (const auto& [xy, T] : spec.edge_hopping.pair_terms()) {
        if (!sub.contains(xy.first) || !sub.contains(xy.second)) continue;
        if (kept.count({xy.second, xy.first})) continue;  // adjoint re-inserted by set_pair
        kept.insert(xy);
        out.edge_hopping.set_pair(xy.first, xy.second, T);
    }
    out.edge_interaction = DensityInteraction();
    for (const auto& t : spec.edge_interaction.terms()) {
        bool inside = true;
        for (const auto& [x, j] : t.modes)
            if (!sub.contains(x)) inside = false;
        if (inside) out.edge_interaction.add(t);
    }
    out.validate();
    return out;
}

ModelSpec add_edge_potential(const ModelSpec& spec,
                             const std::vector<std::pair<Site, double>>& phi) {
    ModelSpec out = spec;
    for (const auto& [x, value] : phi) {
        if (!spec.region.contains(x))
            throw ValidationError("edge potential site " + site_str(x) +
                                  " is outside the region");
        if (distance_to_complement(x, spec.region) > spec.D)
            throw ValidationError("edge potential site " + site_str(x) +
                                  " lies deeper than the edge width " +
                                  std::to_string(spec.D));
        for (int j = 0; j < spec.s; ++j) out.edge_interaction.add({{{x, j}}, value});
    }
    out.validate();
    return out;
}

ModelSpec mask_site_hoppings(const ModelSpec& spec, const std::vector<Site>& sites) {
    ModelSpec out = spec;
    std::set<std::pair<Site, Site>> bonds;  // one orientation per bond
    for (auto x : sites) {
        if (!spec.region.contains(x))
            throw ValidationError("masked site " + site_str(x) + " is outside the region");
        if (distance_to_complement(x, spec.region) > spec.D)
            throw ValidationError("masked site " + site_str(x) +
                                  " lies deeper than the edge width");
        for (const auto& [u, v] : spec.hopping_pairs())
            if (u == x || v == x) {
                if (!bonds.count({v, u})) bonds.insert({u, v});
            }
    }
    for (const auto& [u, v] : bonds) {
        MatC cancel = out.edge_hopping.amplitude(u, v) - out.hopping_amplitude(u, v);
        out.edge_hopping.set_pair(u, v, cancel);
    }
    out.validate();
    return out;
}

TranslationMap magnetic_translation(const ModelSpec& spec, Site y) {
    return TranslationMap{y, spec.b};
}

double local_norm_constant(const ModelSpec& spec, double mu, Part part) {
    if (part == Part::bulk) {
        double hop = 0.0;
        for (const auto& [d, T] : spec.bulk_hopping.displacement_terms())
            hop += operator_norm(T);
        double inter = 0.0;
        for (const auto& t : spec.bulk_interaction.terms()) {
            std::set<Site> support;
            for (const auto& [x, j] : t.modes) support.insert(x);
            inter += std::abs(t.coef) * static_cast<double>(support.size());
        }
        return 2.0 * hop + inter + mu;
    }
    double best = 0.0;
    for (auto x : spec.region.sites()) {
        double hop = 0.0;
        for (const auto& [xy, T] : spec.edge_hopping.pair_terms())
            if (xy.first == x) hop += operator_norm(T);
        double inter = 0.0;
        for (const auto& t : spec.edge_interaction.terms()) {
            bool touches = false;
            for (const auto& [y, j] : t.modes)
                if (y == x) touches = true;
            if (touches) inter += std::abs(t.coef);
        }
        best = std::max(best, 2.0 * hop + inter);
    }
    return best + mu;
}

}  // namespace maglat
