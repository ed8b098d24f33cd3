#include "maglat/free_fermion.hpp"

#include "maglat/eig.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace maglat {

namespace {

// occupation f(eps) = 1 / (1 + exp(beta (eps - mu))), safe at both tails
double fermi(double eps, ThermoParams p) {
    const double x = p.beta * (eps - p.mu);
    if (x > 0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

}  // namespace

OneBodyMatrix one_body(const ModelSpec& spec) {
    auto modes = std::make_shared<const ModeIndex>(spec.region, spec.s);
    const int M = modes->M();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(M, M);
    for (const auto& [x, y] : spec.hopping_pairs()) {
        const MatC T = spec.peierls(x, y);
        for (int i = 0; i < spec.s; ++i)
            for (int j = 0; j < spec.s; ++j)
                if (T(i, j) != cplx(0, 0)) h(modes->mode(x, i), modes->mode(y, j)) += T(i, j);
    }
    for (const auto& t : spec.instantiated_interactions()) {
        if (t.degree() >= 2)
            throw EngineMismatchError(
                "one_body: interaction monomial of degree " + std::to_string(t.degree()) +
                " has no one-body form");
        const int m = modes->mode(t.modes[0].first, t.modes[0].second);
        h(m, m) += t.coef;
    }
    return {std::move(modes), std::move(h)};
}

OneBodySpectrum one_body_spectrum(const OneBodyMatrix& h, bool with_vectors) {
    HermitianEigen eig = hermitian_eigen(h.h, with_vectors);
    return {h.modes, std::move(eig.values), std::move(eig.vectors)};
}

CorrelationMatrix fermi_correlations(const OneBodySpectrum& spec, ThermoParams p) {
    const int M = static_cast<int>(spec.eps.size());
    Eigen::VectorXd f(M);
    for (int k = 0; k < M; ++k) f(k) = fermi(spec.eps(k), p);
    Eigen::MatrixXcd G = spec.V * f.asDiagonal() * spec.V.adjoint();
    return {spec.modes, std::move(G)};
}

CorrelationMatrix fermi_derivative_correlations(const OneBodySpectrum& spec,
                                                ThermoParams p) {
    const int M = static_cast<int>(spec.eps.size());
    Eigen::VectorXd w(M);
    for (int k = 0; k < M; ++k) {
        const double f = fermi(spec.eps(k), p);
        w(k) = p.beta * f * (1.0 - f);
    }
    Eigen::MatrixXcd G = spec.V * w.asDiagonal() * spec.V.adjoint();
    return {spec.modes, std::move(G)};
}

cplx quadratic_expectation(const CorrelationMatrix& G, const std::vector<QuadTerm>& terms) {
    cplx acc(0, 0);
    for (const auto& t : terms) acc += t.c * G.G(t.j, t.i);
    return acc;
}

cplx quadratic_covariance(const CorrelationMatrix& G, const std::vector<QuadTerm>& A,
                          const std::vector<QuadTerm>& B) {
    cplx acc(0, 0);
    for (const auto& a : A)
        for (const auto& b : B) {
            const cplx hole = (a.j == b.i ? cplx(1, 0) : cplx(0, 0)) - G.G(a.j, b.i);
            acc += a.c * b.c * G.G(b.j, a.i) * hole;
        }
    return acc;
}

double free_log_partition_function(const Eigen::VectorXd& eps, ThermoParams p) {
    double acc = 0.0;
    for (int k = 0; k < eps.size(); ++k) {
        const double z = -p.beta * (eps(k) - p.mu);
        // softplus log(1 + e^z) without overflow
        acc += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    }
    return acc;
}

// --- FreeEngine ---

FreeEngine::FreeEngine(const ModelSpec& spec)
    : spec_(spec), modes_(std::make_shared<const ModeIndex>(spec.region, spec.s)) {
    spec_.validate();
    if (!spec_.quadratic())
        throw EngineMismatchError(
            "FreeEngine: model has interaction monomials of degree >= 2");
}

void FreeEngine::ensure_spectrum(bool need_vectors) {
    if (need_vectors ? have_vec_ : have_eps_) return;
    OneBodySpectrum fresh = one_body_spectrum(one_body(spec_), need_vectors);
    // keep the first eigenvalues so thermodynamic values never shift when the
    // vector solve upgrades the spectrum later
    if (have_eps_) fresh.eps = spectrum_.eps;
    spectrum_ = std::move(fresh);
    have_eps_ = true;
    have_vec_ = need_vectors;
}

const OneBodySpectrum& FreeEngine::spectrum() {
    ensure_spectrum(true);
    return spectrum_;
}

double FreeEngine::log_Z(ThermoParams p) {
    ensure_spectrum(false);
    return free_log_partition_function(spectrum_.eps, p);
}

const CorrelationMatrix& FreeEngine::correlations(ThermoParams p) {
    ensure_spectrum(true);
    auto [it, inserted] = corr_.try_emplace({p.beta, p.mu});
    if (inserted) it->second = fermi_correlations(spectrum_, p);
    return it->second;
}

double FreeEngine::expectation(const std::vector<QuadTerm>& A, ThermoParams p) {
    return quadratic_expectation(correlations(p), A).real();
}

double FreeEngine::covariance(const std::vector<QuadTerm>& A,
                              const std::vector<QuadTerm>& B, ThermoParams p) {
    return quadratic_covariance(correlations(p), A, B).real();
}

double FreeEngine::truncated_fluctuation(const SiteSet& Z, const std::vector<QuadTerm>& A,
                                         ThermoParams p) {
    const auto NZ = number_terms(Z, *modes_);
    return p.beta * quadratic_covariance(correlations(p), NZ, A).real();
}

double FreeEngine::mu_derivative(const std::vector<QuadTerm>& A, ThermoParams p) {
    ensure_spectrum(true);
    const CorrelationMatrix dG = fermi_derivative_correlations(spectrum_, p);
    return quadratic_expectation(dG, A).real();
}

std::vector<QuadTerm> number_terms(const SiteSet& Z, const ModeIndex& modes) {
    std::vector<QuadTerm> out;
    out.reserve(Z.size() * static_cast<size_t>(modes.s()));
    for (auto x : Z.sites())
        for (int j = 0; j < modes.s(); ++j) {
            const int m = modes.mode(x, j);
            out.push_back({m, m, cplx(1, 0)});
        }
    return out;
}

}  // namespace maglat
