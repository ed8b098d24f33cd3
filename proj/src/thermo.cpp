#include "maglat/thermo.hpp"

#include "maglat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace maglat {

Engine resolve_engine(const ModelSpec& spec, Engine requested) {
    if (requested != Engine::auto_select) return requested;
    return spec.quadratic() ? Engine::free : Engine::ed;
}

const char* engine_name(Engine e) {
    switch (e) {
        case Engine::ed: return "ed";
        case Engine::free: return "free";
        case Engine::auto_select: return "auto";
    }
    return "auto";
}

Engine parse_engine(const std::string& name) {
    if (name == "ed") return Engine::ed;
    if (name == "free") return Engine::free;
    if (name == "auto") return Engine::auto_select;
    throw ValidationError("engine must be one of ed/free/auto, got \"" + name + "\"");
}

// --- AnyEngine ---

AnyEngine::AnyEngine(const ModelSpec& spec, Engine kind)
    : kind_(resolve_engine(spec, kind)) {
    if (kind_ == Engine::ed)
        ed_ = std::make_unique<EdEngine>(spec);
    else
        free_ = std::make_unique<FreeEngine>(spec);
}

const ModelSpec& AnyEngine::spec() const { return ed_ ? ed_->spec() : free_->spec(); }

ModesPtr AnyEngine::modes() const { return ed_ ? ed_->modes() : free_->modes(); }

double AnyEngine::log_Z(ThermoParams p) { return ed_ ? ed_->log_Z(p) : free_->log_Z(p); }

double AnyEngine::expectation(const std::vector<QuadTerm>& A, ThermoParams p) {
    if (free_) return free_->expectation(A, p);
    return ed_->expectation(assemble_quadratic(ed_->modes(), A, true), p);
}

double AnyEngine::covariance(const std::vector<QuadTerm>& A,
                             const std::vector<QuadTerm>& B, ThermoParams p) {
    if (free_) return free_->covariance(A, B, p);
    return ed_->covariance(assemble_quadratic(ed_->modes(), A, true),
                           assemble_quadratic(ed_->modes(), B, true), p);
}

double AnyEngine::truncated_fluctuation(const SiteSet& Z, const std::vector<QuadTerm>& A,
                                        ThermoParams p) {
    if (free_) return free_->truncated_fluctuation(Z, A, p);
    return truncated_fluctuation_expectation(
        ed_->spectrum(), Z, assemble_quadratic(ed_->modes(), A, true), p);
}

double AnyEngine::mu_derivative(const std::vector<QuadTerm>& A, ThermoParams p) {
    if (free_) return free_->mu_derivative(A, p);
    return mu_derivative_expectation(ed_->spectrum(),
                                     assemble_quadratic(ed_->modes(), A, true), p);
}

EdEngine* AnyEngine::ed() { return ed_.get(); }
FreeEngine* AnyEngine::free_eng() { return free_.get(); }

CurrentField current_field(AnyEngine& eng, ThermoParams p) {
    if (eng.free_eng()) return current_field(*eng.free_eng(), p);
    return current_field(*eng.ed(), p);
}

// --- pressure ---

double pressure(AnyEngine& eng, ThermoParams p) {
    const double vol = static_cast<double>(eng.spec().region.size());
    if (vol == 0.0) return 0.0;
    return -eng.log_Z(p) / (p.beta * vol);
}

double pressure(const ModelSpec& spec, ThermoParams p, Engine kind) {
    AnyEngine eng(spec, kind);
    return pressure(eng, p);
}

// --- magnetization ---

namespace {

double volume(const ModelSpec& spec) { return static_cast<double>(spec.region.size()); }

double weighted_current_sum(const CurrentField& field) {
    double acc = 0.0;
    for (const auto& [e, value] : field.j)
        if (e.k == 1) acc += static_cast<double>(e.z.x2) * value;
    return acc;
}

// I^d as one quadratic observable: the column's bottom d dual-edge currents,
// negated to match the boundary-circulation orientation of edge_current
std::vector<QuadTerm> edge_current_terms(const ModelSpec& spec, const ModeIndex& modes,
                                         int d, int column) {
    std::vector<QuadTerm> out;
    for (int n = 0; n < d; ++n) {
        auto terms = current_quad_terms(spec, modes, DualEdge{1, {column, n}});
        for (auto& t : terms) t.c = -t.c;
        out.insert(out.end(), terms.begin(), terms.end());
    }
    return out;
}

double rel_gap(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-14});
    return std::abs(a - b) / scale;
}

}  // namespace

MagnetizationReport magnetization(const ModelSpec& spec, ThermoParams p, Engine kind,
                                  double fd_step, const std::vector<int>& depths,
                                  int column) {
    const Engine resolved = resolve_engine(spec, kind);
    MagnetizationReport rep;
    rep.fd_step = fd_step;
    rep.column = column;

    ModelSpec plus = spec, minus = spec;
    plus.b = spec.b + fd_step;
    minus.b = spec.b - fd_step;
    rep.m_fd = (pressure(plus, p, resolved) - pressure(minus, p, resolved)) / (2 * fd_step);

    AnyEngine eng(spec, resolved);
    const double vol = volume(spec);
    rep.m_duhamel = eng.expectation(field_derivative_terms(spec, *eng.modes()), p) / vol;

    const CurrentField field = current_field(eng, p);
    rep.m_current_sum = weighted_current_sum(field) / vol;
    for (int d : depths) rep.edge_currents[d] = edge_current(field, d, column);

    rep.gap_fd_duhamel = std::abs(rep.m_fd - rep.m_duhamel);
    rep.gap_duhamel_current = std::abs(rep.m_duhamel - rep.m_current_sum);
    return rep;
}

double magnetization_duhamel(AnyEngine& eng, ThermoParams p) {
    return eng.expectation(field_derivative_terms(eng.spec(), *eng.modes()), p) /
           volume(eng.spec());
}

// --- mu-derivative identities ---

MuDerivativeReport mu_derivative_report(const ModelSpec& spec, ThermoParams p,
                                        Engine kind, double fd_step, int d, int column) {
    AnyEngine eng(spec, kind);
    const double vol = volume(spec);
    const double h = fd_step;
    MuDerivativeReport rep;
    rep.fd_step = h;
    rep.d = d;
    rep.column = column;

    const auto A_m = field_derivative_terms(spec, *eng.modes());
    const auto A_I = edge_current_terms(spec, *eng.modes(), d, column);
    const ThermoParams up{p.beta, p.mu + h};
    const ThermoParams dn{p.beta, p.mu - h};

    // one correlation rebuild per mu value: evaluate both observables together
    const double m_up = eng.expectation(A_m, up) / vol;
    const double I_up = eng.expectation(A_I, up);
    const double m_dn = eng.expectation(A_m, dn) / vol;
    const double I_dn = eng.expectation(A_I, dn);

    rep.dmu_m_cov = eng.mu_derivative(A_m, p) / vol;
    rep.dmu_m_fd = (m_up - m_dn) / (2 * h);
    rep.m_rel_gap = rel_gap(rep.dmu_m_cov, rep.dmu_m_fd);

    rep.dmu_I_cov = eng.mu_derivative(A_I, p);
    rep.dmu_I_fd = (I_up - I_dn) / (2 * h);
    rep.I_rel_gap = rel_gap(rep.dmu_I_cov, rep.dmu_I_fd);

    rep.gap_m_vs_I = std::abs(rep.dmu_m_cov - rep.dmu_I_cov);

    rep.dp_dmu_fd = (-eng.log_Z(up) / (up.beta * vol) + eng.log_Z(dn) / (dn.beta * vol)) /
                    (2 * h);
    rep.minus_density = -eng.expectation(number_terms(spec.region, *eng.modes()), p) / vol;
    rep.gap_pressure = std::abs(rep.dp_dmu_fd - rep.minus_density);
    return rep;
}

// --- five-region decomposition ---

FiveRegionReport five_region_report(const CurrentField& field, int d) {
    if (d <= field.D + field.R)
        throw ValidationError("five_region_report: d = " + std::to_string(d) +
                              " must exceed D + R = " +
                              std::to_string(field.D + field.R));
    if (d > field.L)
        throw ValidationError("five_region_report: d = " + std::to_string(d) +
                              " exceeds L = " + std::to_string(field.L));
    const FiveRegionMasks masks = five_region_masks(field.L, d);
    const double vol = static_cast<double>(2 * field.L + 1) * (2 * field.L + 1);

    FiveRegionReport rep;
    rep.d = d;
    auto tally = [&](const RegionMask& mask, double& slot, const char* name) {
        double acc = 0.0;
        for (const DualEdge& e : mask.edges)
            acc += static_cast<double>(e.z.x2) * field.at(e);
        slot = acc / vol;
        rep.counts[name] = static_cast<int>(mask.edges.size());
    };
    tally(masks.left, rep.left, "left");
    tally(masks.right, rep.right, "right");
    tally(masks.bottom, rep.bottom, "bottom");
    tally(masks.top, rep.top, "top");
    tally(masks.bulk, rep.bulk, "bulk");
    rep.total = rep.left + rep.right + rep.bottom + rep.top + rep.bulk;
    return rep;
}

// --- local observables ---

SiteSet LocalObservable::support(const ModelSpec& spec) const {
    if (kind == Kind::number) return X;
    std::vector<Site> sites;
    for (const auto& t : current_coefficients(spec, e).terms) {
        sites.push_back(t.x);
        sites.push_back(t.y);
    }
    return SiteSet::of(std::move(sites));
}

std::vector<QuadTerm> LocalObservable::quad_terms(const ModelSpec& spec,
                                                  const ModeIndex& modes) const {
    if (kind == Kind::number) return number_terms(X, modes);
    return current_quad_terms(spec, modes, e);
}

std::string LocalObservable::name() const {
    std::ostringstream os;
    if (kind == Kind::number) {
        os << "N{";
        const auto& sites = X.sites();
        for (size_t i = 0; i < sites.size() && i < 4; ++i) {
            if (i) os << ";";
            os << "(" << sites[i].x1 << "," << sites[i].x2 << ")";
        }
        if (sites.size() > 4) os << ";+" << (sites.size() - 4);
        os << "}";
    } else {
        os << "J" << e.k << "(" << e.z.x1 << "," << e.z.x2 << ")";
    }
    return os.str();
}

IndistinguishabilityReport indistinguishability_gap(const ModelSpec& full, ThermoParams p,
                                                    Engine kind, const SiteSet& sub,
                                                    const LocalObservable& A) {
    IndistinguishabilityReport rep;
    rep.observable = A.name();

    AnyEngine eng_full(full, kind);
    rep.value_full = eng_full.expectation(A.quad_terms(full, *eng_full.modes()), p);

    const ModelSpec restricted = restrict_to(full, sub);
    AnyEngine eng_sub(restricted, kind);
    rep.value_sub = eng_sub.expectation(A.quad_terms(restricted, *eng_sub.modes()), p);

    rep.gap = std::abs(rep.value_full - rep.value_sub);
    const SiteSet supp = A.support(full);
    rep.dist_to_sub_complement = set_distance_to_complement(supp, sub);
    if (!(full.region == sub)) {
        auto dist = set_distance(supp, full.region.minus(sub));
        if (dist) rep.dist_to_region_minus_sub = *dist;
    }
    return rep;
}

double current_expectation(AnyEngine& eng, DualEdge e, ThermoParams p) {
    return eng.expectation(current_quad_terms(eng.spec(), *eng.modes(), e), p);
}

// --- truncated fluctuation locality ---

FluctuationLocalityReport fluctuation_locality(const ModelSpec& spec, ThermoParams p,
                                               Engine kind, const LocalObservable& A,
                                               Site center, const std::vector<int>& radii) {
    AnyEngine eng(spec, kind);
    const auto terms = A.quad_terms(spec, *eng.modes());
    FluctuationLocalityReport rep;
    rep.observable = A.name();
    rep.radii = radii;
    rep.full = eng.truncated_fluctuation(spec.region, terms, p);
    for (int r : radii) {
        const SiteSet Z = SiteSet::ball_in(center, r, spec.region);
        rep.truncated.push_back(eng.truncated_fluctuation(Z, terms, p));
        rep.gaps.push_back(std::abs(rep.full - rep.truncated.back()));
    }
    return rep;
}

// --- edge independence ---

EdgeIndependenceReport edge_independence_gap(const ModelSpec& A, const ModelSpec& B,
                                             ThermoParams p, Engine kind, int d,
                                             int column) {
    AnyEngine engA(A, kind);
    AnyEngine engB(B, kind);
    const CurrentField fA = current_field(engA, p);
    const CurrentField fB = current_field(engB, p);
    if (fA.L != fB.L)
        throw ValidationError("edge_independence_gap: models live on different boxes");
    const int L = fA.L;

    EdgeIndependenceReport rep;
    rep.d = d;
    rep.column = column;
    rep.I_A = edge_current(fA, d, column);
    rep.I_B = edge_current(fB, d, column);
    rep.gap = std::abs(rep.I_A - rep.I_B);

    // column conservation folds the bottom difference into the rest of the
    // column; middle rows are triangle-bounded one model at a time
    double bound = 0.0;
    for (int n = d; n <= 2 * L - d; ++n)
        bound += std::abs(fA.at(1, column, n)) + std::abs(fB.at(1, column, n));
    for (int n = 2 * L - d + 1; n <= 2 * L; ++n)
        bound += std::abs(fA.at(1, column, n) - fB.at(1, column, n));
    rep.measured_bound = bound;
    return rep;
}

// --- edge/bulk pressure comparison ---

BulkPressureReport bulk_pressure_comparison(const ModelSpec& spec, ThermoParams p,
                                            Engine kind) {
    if (spec.region.kind() != SiteSet::Kind::box || !spec.region.box_L())
        throw ValidationError("bulk_pressure_comparison: region must be a box Lambda_L");
    const int L = *spec.region.box_L();

    ModelSpec bulk = spec;
    bulk.region = SiteSet::centered_box(L);
    bulk.edge_hopping = HoppingMap(spec.edge_hopping.range(), spec.s);
    bulk.edge_interaction = DensityInteraction();
    bulk.validate();

    BulkPressureReport rep;
    rep.p_edge_model = pressure(spec, p, kind);
    rep.p_bulk_model = pressure(bulk, p, kind);
    rep.gap = std::abs(rep.p_edge_model - rep.p_bulk_model);
    rep.bound = local_norm_constant(spec, p.mu, Part::edge) * spec.D /
                static_cast<double>(2 * L + 1);
    return rep;
}

}  // namespace maglat
