#include <doctest.h>

#include "maglat/free_fermion.hpp"
#include "oracle_utils.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

using namespace maglat;
using doctest::Approx;

namespace {

ModelSpec two_site_hop(double t) {
    ModelSpec m;
    m.region = SiteSet::of({{0, 0}, {1, 0}});
    m.s = 1;
    m.D = 1;
    m.bulk_hopping = HoppingMap(1, 1);
    m.edge_hopping = HoppingMap(1, 1);
    m.bulk_hopping.set_displacement({1, 0}, MatC::Constant(1, 1, t));
    m.validate();
    return m;
}

ModelSpec plaquette(double b) {
    return restrict_to(hofstadter(1, b), SiteSet::of({{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
}

}  // namespace

TEST_CASE("one-body matrix: examples and refusals") {
    auto two = two_site_hop(1.0);
    auto hb = one_body(two);
    REQUIRE(hb.h.rows() == 2);
    CHECK(std::abs(hb.h(0, 1) - cplx(1.0, 0.0)) == 0.0);
    CHECK((hb.h - hb.h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    auto sp = one_body_spectrum(hb);
    CHECK(sp.eps(0) == Approx(-1.0).epsilon(1e-14));
    CHECK(sp.eps(1) == Approx(1.0).epsilon(1e-14));

    CHECK(one_body(hofstadter(2, 0.0)).h.imag().cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS((void)one_body(spinless_tv(1, 0.3, 1.0, 0.5)), EngineMismatchError);
    CHECK_THROWS_AS((void)one_body(hofstadter_hubbard(1, 0.3, 1.0)), EngineMismatchError);
    CHECK_NOTHROW((void)one_body(hofstadter_hubbard(1, 0.3, 0.0)));

    // degree-1 edge density terms land on the diagonal
    auto edged = add_edge_potential(hofstadter(1, 0.4), {{{0, 0}, 0.9}, {{1, 2}, -0.3}});
    auto he = one_body(edged);
    int k = he.modes->mode({0, 0}, 0);
    CHECK(he.h(k, k) == cplx(0.9, 0.0));
    CHECK(he.h(he.modes->mode({1, 2}, 0), he.modes->mode({1, 2}, 0)) == cplx(-0.3, 0.0));
    CHECK(he.h(he.modes->mode({0, 1}, 0), he.modes->mode({0, 1}, 0)) == cplx(0.0, 0.0));
}

TEST_CASE("one-body matrix equals the one-particle sector") {
    auto sq = plaquette(M_PI / 2);
    auto hb = one_body(sq);
    auto modes = std::make_shared<const ModeIndex>(sq.region, sq.s);
    auto H = assemble(sq, modes);
    // words 1 << k sorted ascending index exactly as mode k
    oracle::Dense blk = oracle::Dense(H.block(1));
    CHECK((blk - hb.h).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("fermi correlations: fixed points and spectral range") {
    // resonant single level: occupation one half at mu = eps
    auto single = add_edge_potential(
        [] {
            ModelSpec m;
            m.region = SiteSet::of({{0, 0}});
            m.s = 1;
            m.D = 1;
            m.bulk_hopping = HoppingMap(1, 1);
            m.edge_hopping = HoppingMap(1, 1);
            return m;
        }(),
        {{{0, 0}, 0.6}});
    auto sp1 = one_body_spectrum(one_body(single));
    CHECK(fermi_correlations(sp1, {2.3, 0.6}).G(0, 0).real() == Approx(0.5).epsilon(1e-14));

    auto spec = hofstadter(2, 0.8);
    auto sp = one_body_spectrum(one_body(spec));
    auto G = fermi_correlations(sp, {1.1, 0.2}).G;
    CHECK((G - G.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-12);

    // band edges: mu far below empties the system, far above fills it
    CHECK(fermi_correlations(sp, {200.0, -8.0}).G.trace().real() == Approx(0.0).epsilon(1e-12));
    CHECK(fermi_correlations(sp, {200.0, 8.0}).G.trace().real() ==
          Approx(25.0).epsilon(1e-12));
}

TEST_CASE("trace of correlations equals the particle number from log Z") {
    auto spec = hofstadter(2, 0.55);
    auto sp = one_body_spectrum(one_body(spec));
    ThermoParams p{1.7, 0.35};
    double n = fermi_correlations(sp, p).G.trace().real();
    double h = 1e-5;
    double fd = (free_log_partition_function(sp.eps, {p.beta, p.mu + h}) -
                 free_log_partition_function(sp.eps, {p.beta, p.mu - h})) /
                (2 * h * p.beta);
    CHECK(n == Approx(fd).epsilon(1e-6));
}

TEST_CASE("particle-hole symmetry pins half filling at mu = 0") {
    for (double b : {0.0, 0.9}) {
        auto sp = one_body_spectrum(one_body(hofstadter(2, b)));
        CHECK(fermi_correlations(sp, {1.3, 0.0}).G.trace().real() ==
              Approx(12.5).epsilon(1e-12));
    }
}

TEST_CASE("quadratic expectations against exact diagonalization") {
    auto sq = plaquette(0.7);
    ThermoParams p{1.2, 0.3};

    FreeEngine fe(sq);
    EdEngine ed(sq);

    CHECK(fe.log_Z(p) == Approx(ed.log_Z(p)).epsilon(1e-10));

    auto terms_N = number_terms(sq.region, *fe.modes());
    auto op_N = number_operator(sq.region, ed.modes());
    CHECK(fe.expectation(terms_N, p) == Approx(ed.expectation(op_N, p)).epsilon(1e-10));

    // a directed bond observable with complex weight, closed to Hermitian
    int i = fe.modes()->mode({0, 0}, 0), j = fe.modes()->mode({1, 0}, 0);
    cplx c(0.0, 1.0);
    std::vector<QuadTerm> A{{i, j, c}, {j, i, std::conj(c)}};
    auto op_A = assemble_quadratic(ed.modes(), A, true);
    CHECK(fe.expectation(A, p) == Approx(ed.expectation(op_A, p)).epsilon(1e-10));

    // Wick covariance against the sector-resolved one
    auto terms_X = number_terms(SiteSet::of({{0, 0}, {0, 1}}), *fe.modes());
    auto op_X = number_operator(SiteSet::of({{0, 0}, {0, 1}}), ed.modes());
    CHECK(fe.covariance(terms_X, A, p) ==
          Approx(ed.covariance(op_X, op_A, p)).epsilon(1e-10));
    CHECK(fe.covariance(A, A, p) >= -1e-12);

    // identity-like diagonal sum reproduces tr G
    auto G = fermi_correlations(fe.spectrum(), p);
    std::vector<QuadTerm> diag;
    for (int m = 0; m < fe.modes()->M(); ++m) diag.push_back({m, m, 1.0});
    CHECK(quadratic_expectation(G, diag).real() == Approx(G.G.trace().real()).epsilon(1e-14));
}

TEST_CASE("free log partition function closed forms") {
    Eigen::VectorXd eps(1);
    eps << 0.4;
    double beta = 1.9, mu = 0.7;
    CHECK(free_log_partition_function(eps, {beta, mu}) ==
          Approx(std::log1p(std::exp(-beta * (0.4 - mu)))).epsilon(1e-14));
    // stable on both tails
    CHECK(free_log_partition_function(eps, {1000.0, 10.0}) ==
          Approx(1000.0 * 9.6).epsilon(1e-12));
    CHECK(free_log_partition_function(eps, {1000.0, -10.0}) >= 0.0);
    CHECK(free_log_partition_function(eps, {1000.0, -10.0}) < 1e-10);
    CHECK(free_log_partition_function(Eigen::VectorXd(), {1.0, 0.0}) == 0.0);
}

TEST_CASE("fermi derivative matrix matches finite differences") {
    auto single = one_body_spectrum(one_body(two_site_hop(0.0)));
    CHECK(fermi_derivative_correlations(single, {1.6, 0.0}).G(0, 0).real() ==
          Approx(1.6 / 4).epsilon(1e-14));

    auto sp = one_body_spectrum(one_body(hofstadter(2, 0.8)));
    ThermoParams p{1.5, 0.2};
    auto D = fermi_derivative_correlations(sp, p).G;
    double h = 1e-5;
    Eigen::MatrixXcd fd = (fermi_correlations(sp, {p.beta, p.mu + h}).G -
                           fermi_correlations(sp, {p.beta, p.mu - h}).G) /
                          (2 * h);
    CHECK((D - fd).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("mu derivative of observables: derivative matrix vs finite differences") {
    auto spec = hofstadter(10, 2 * M_PI * 0.15);
    FreeEngine fe(spec);
    ThermoParams p{2.0, 0.0};

    int i = fe.modes()->mode({0, 10}, 0), j = fe.modes()->mode({1, 10}, 0);
    cplx amp = cplx(0, 1) * fe.spec().peierls({1, 10}, {0, 10})(0, 0);
    std::vector<QuadTerm> A{{j, i, amp}, {i, j, std::conj(amp)}};

    double an = fe.mu_derivative(A, p);
    double h = 1e-5;
    double fd = (fe.expectation(A, {p.beta, h}) - fe.expectation(A, {p.beta, -h})) / (2 * h);
    CHECK(an == Approx(fd).epsilon(1e-6));

    // equality with the Wick route through the full number operator
    auto terms_N = number_terms(spec.region, *fe.modes());
    CHECK(an == Approx(p.beta * fe.covariance(terms_N, A, p)).epsilon(1e-10));
    // and with the fluctuation truncated to the full region
    CHECK(an == Approx(fe.truncated_fluctuation(spec.region, A, p)).epsilon(1e-10));
}

TEST_CASE("correlations flatten inside a spectral gap") {
    auto sp = one_body_spectrum(one_body(hofstadter(3, 2 * M_PI / 3)));
    // find the widest interior level spacing and park mu in the middle
    int M = static_cast<int>(sp.eps.size());
    int at = M / 4;
    double width = 0.0;
    for (int k = M / 5; k < 4 * M / 5; ++k)
        if (sp.eps(k + 1) - sp.eps(k) > width) {
            width = sp.eps(k + 1) - sp.eps(k);
            at = k;
        }
    REQUIRE(width > 0.05);
    const double beta = 200.0;
    double mu = 0.5 * (sp.eps(at) + sp.eps(at + 1));
    auto G = fermi_correlations(sp, {beta, mu}).G;
    Eigen::MatrixXcd F = G * (Eigen::MatrixXcd::Identity(M, M) - G);
    // every entry is bounded by the largest f (1 - f), reached at the gap edge
    double edge = std::exp(-beta * width / 2) * 1.0000001 + 1e-15;
    CHECK(F.cwiseAbs().maxCoeff() <= edge);
}

TEST_CASE("free engine memoizes spectra and correlation matrices") {
    auto spec = hofstadter(2, 0.45);
    FreeEngine fe(spec);
    ThermoParams p{1.0, 0.1};

    double z1 = fe.log_Z(p);  // may use the eigenvalue-only path
    const auto& s1 = fe.spectrum();
    CHECK(s1.V.cols() == s1.eps.size());
    double z2 = fe.log_Z(p);
    CHECK(z1 == z2);
    CHECK(z1 == Approx(free_log_partition_function(s1.eps, p)).epsilon(1e-14));

    const auto& c1 = fe.correlations(p);
    const auto& c2 = fe.correlations(p);
    CHECK(&c1 == &c2);
    const auto& c3 = fe.correlations({1.0, 0.2});
    CHECK(c3.G.trace().real() > c1.G.trace().real());  // filling grows with mu
}

TEST_CASE("number covariance decays with separation on a cold window") {
    // 5 x 5 box, high temperature: correlations die off within a few sites
    auto spec = hofstadter(2, 0.7);
    FreeEngine fe(spec);
    ThermoParams p{0.25, 0.0};

    auto nX = number_terms(SiteSet::of({{0, 2}}), *fe.modes());
    double prev = std::numeric_limits<double>::infinity();
    std::vector<double> envelope;
    for (int d = 1; d <= 2; ++d) {
        double worst = 0.0;
        for (auto z : spec.region.sites())
            if (distance(z, {0, 2}) == d) {
                auto nY = number_terms(SiteSet::of({z}), *fe.modes());
                worst = std::max(worst, std::abs(fe.covariance(nX, nY, p)));
            }
        envelope.push_back(worst);
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(envelope[1] < 0.2 * envelope[0]);
}

TEST_CASE("free log Z is convex in mu") {
    auto sp = one_body_spectrum(one_body(hofstadter(2, 0.35)));
    const double beta = 0.8, dmu = 0.5;
    for (double mu = -2.0; mu <= 1.0; mu += dmu) {
        double a = free_log_partition_function(sp.eps, {beta, mu});
        double b = free_log_partition_function(sp.eps, {beta, mu + dmu});
        double c = free_log_partition_function(sp.eps, {beta, mu + 2 * dmu});
        CHECK(a + c - 2 * b >= -1e-9);
    }
}
