#include "maglat/currents.hpp"

#include "maglat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maglat {

CurrentCoefficients current_coefficients(const ModelSpec& spec, DualEdge e) {
    CurrentCoefficients out{e, {}};
    for (const auto& [x, y] : spec.hopping_pairs()) {
        const Crossing c = classify_crossing(e, x, y);
        if (c == Crossing::none) continue;
        const int xk = (e.k == 1) ? x.x1 : x.x2;
        const int yk = (e.k == 1) ? y.x1 : y.x2;
        out.terms.push_back({x, y, c == Crossing::interior ? 1.0 : 0.5,
                             xk > yk ? 1 : -1});
    }
    return out;
}

std::vector<QuadTerm> current_quad_terms(const ModelSpec& spec, const ModeIndex& modes,
                                         DualEdge e) {
    std::vector<QuadTerm> out;
    for (const auto& t : current_coefficients(spec, e).terms) {
        const MatC T = spec.peierls(t.x, t.y);
        const cplx factor = cplx(0, 1) * static_cast<double>(t.sign) * t.weight;
        for (int i = 0; i < spec.s; ++i)
            for (int j = 0; j < spec.s; ++j)
                if (T(i, j) != cplx(0, 0))
                    out.push_back({modes.mode(t.x, i), modes.mode(t.y, j),
                                   factor * T(i, j)});
    }
    return out;
}

std::vector<QuadTerm> field_derivative_terms(const ModelSpec& spec,
                                             const ModeIndex& modes) {
    std::vector<QuadTerm> out;
    for (const auto& [x, y] : spec.hopping_pairs()) {
        const double phi = 0.5 * (x.x2 + y.x2) * (x.x1 - y.x1);
        if (phi == 0.0) continue;
        const MatC T = spec.peierls(x, y);
        for (int i = 0; i < spec.s; ++i)
            for (int j = 0; j < spec.s; ++j)
                if (T(i, j) != cplx(0, 0))
                    out.push_back({modes.mode(x, i), modes.mode(y, j),
                                   cplx(0, phi) * T(i, j)});
    }
    return out;
}

double CurrentField::at(DualEdge e) const { return j.at(e); }

double CurrentField::at(int k, int z1, int z2) const {
    return at(DualEdge{k, {z1, z2}});
}

namespace {

std::vector<DualEdge> all_box_edges(int L) {
    std::vector<DualEdge> out = vertical_dual_edges(L);
    auto horiz = horizontal_dual_edges(L);
    out.insert(out.end(), horiz.begin(), horiz.end());
    return out;
}

int require_box(const ModelSpec& spec) {
    if (spec.region.kind() != SiteSet::Kind::box || !spec.region.box_L())
        throw ValidationError("current_field: region must be a box Lambda_L");
    return *spec.region.box_L();
}

template <typename Engine, typename Eval>
CurrentField field_impl(Engine& eng, ThermoParams p, Eval&& eval) {
    const ModelSpec& spec = eng.spec();
    const int L = require_box(spec);
    CurrentField field;
    field.L = L;
    field.R = spec.range();
    field.D = spec.D;
    field.b = spec.b;
    field.params = p;
    for (const DualEdge& e : all_box_edges(L)) {
        auto terms = current_quad_terms(spec, *eng.modes(), e);
        field.j[e] = terms.empty() ? 0.0 : eval(terms);
    }
    return field;
}

}  // namespace

CurrentField current_field(EdEngine& eng, ThermoParams p) {
    return field_impl(eng, p, [&](const std::vector<QuadTerm>& terms) {
        return eng.expectation(assemble_quadratic(eng.modes(), terms, true), p);
    });
}

CurrentField current_field(FreeEngine& eng, ThermoParams p) {
    return field_impl(eng, p, [&](const std::vector<QuadTerm>& terms) {
        return eng.expectation(terms, p);
    });
}

double divergence_residual(EdEngine& eng, Site z) {
    const ModesPtr& modes = eng.modes();
    SectorOperator Nz = number_operator(SiteSet::of({z}), modes);
    SectorOperator lhs = i_commutator_with_diagonal(eng.hamiltonian(), Nz);

    std::vector<QuadTerm> rhs_terms;
    auto accumulate = [&](DualEdge e, double orientation) {
        for (auto t : current_quad_terms(eng.spec(), *modes, e)) {
            t.c *= orientation;
            rhs_terms.push_back(t);
        }
    };
    accumulate({1, z}, 1.0);
    accumulate({1, {z.x1 - 1, z.x2}}, -1.0);
    accumulate({2, z}, 1.0);
    accumulate({2, {z.x1, z.x2 - 1}}, -1.0);
    SectorOperator rhs = assemble_quadratic(modes, rhs_terms, true);
    return max_abs_difference(lhs, rhs);
}

double conservation_sum(const CurrentField& field, const SiteSet& Z,
                        const SiteSet& ambient) {
    double acc = 0.0;
    for (const auto& se : dual_edge_boundary(Z, ambient)) {
        auto it = field.j.find(se.e);
        if (it != field.j.end()) acc += se.sign * it->second;
    }
    return acc;
}

double edge_current(const CurrentField& field, int d, int column) {
    // oriented along the boundary circulation (-x1 across the bottom rows);
    // the raw field orients every k=1 edge in +x1
    double acc = 0.0;
    for (int n = 0; n < d; ++n) acc -= field.at(1, column, n);
    return acc;
}

int shell_distance(DualEdge e, int L) {
    const SiteSet box = SiteSet::box(L);
    const Site a = e.z;
    const Site b = e.k == 1 ? Site{e.z.x1 + 1, e.z.x2} : Site{e.z.x1, e.z.x2 + 1};
    return std::min(distance_to_complement(a, box), distance_to_complement(b, box));
}

DecayProfile bloch_profile(const CurrentField& field) {
    DecayProfile prof;
    for (const auto& [e, value] : field.j) {
        const int r = shell_distance(e, field.L);
        if (r < 1) continue;
        if (static_cast<size_t>(r) > prof.shell_max.size()) {
            prof.shell_max.resize(static_cast<size_t>(r), 0.0);
            prof.shell_count.resize(static_cast<size_t>(r), 0);
        }
        prof.shell_max[static_cast<size_t>(r - 1)] =
            std::max(prof.shell_max[static_cast<size_t>(r - 1)], std::abs(value));
        prof.shell_count[static_cast<size_t>(r - 1)] += 1;
    }
    // least-squares line through (r, log shell_max(r)) over positive entries
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t idx = 0; idx < prof.shell_max.size(); ++idx) {
        if (prof.shell_max[idx] <= 0.0) continue;
        const double r = static_cast<double>(idx + 1);
        const double y = std::log(prof.shell_max[idx]);
        n += 1;
        sx += r;
        sy += y;
        sxx += r * r;
        sxy += r * y;
    }
    if (n >= 2 && n * sxx - sx * sx > 0) {
        prof.envelope_rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        prof.envelope_intercept = (sy - prof.envelope_rate * sx) / n;
    }
    return prof;
}

namespace {

double profile_peak(const DecayProfile& prof) {
    double C = 0.0;
    for (double v : prof.shell_max) C = std::max(C, v);
    return C;
}

}  // namespace

double theta_objective(const DecayProfile& prof, int L, int R, int D, int d) {
    const double C = profile_peak(prof);
    if (C == 0.0) return 0.0;
    const int n_max = static_cast<int>(prof.shell_max.size());
    auto zeta = [&](int n) {
        if (n > n_max) return 0.0;
        if (n < 1) n = 1;
        return prof.shell_max[static_cast<size_t>(n - 1)] / C;
    };
    double tail = 0.0;
    for (int n = d - R - D; n <= n_max; ++n) tail += zeta(n);
    return 2.0 * C * (2.0 * static_cast<double>(d) * d / L + tail);
}

ThetaBound theta_bound(const DecayProfile& prof, int L, int R, int D) {
    ThetaBound out;
    out.C = profile_peak(prof);
    if (out.C == 0.0) return out;
    double best = std::numeric_limits<double>::infinity();
    const int lo = std::min(R + D, L);
    for (int d = lo; d <= L; ++d) {
        const double v = theta_objective(prof, L, R, D, d);
        if (v < best) {
            best = v;
            out.best_d = d;
        }
    }
    out.theta = best;
    return out;
}

}  // namespace maglat
