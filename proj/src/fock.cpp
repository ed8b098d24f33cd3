#include "maglat/fock.hpp"

#include "maglat/eig.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace maglat {

namespace {

// parity of the Jordan-Wigner string below mode k
double jw_sign(std::uint64_t word, int k) {
    std::uint64_t lower = word & ((std::uint64_t{1} << k) - 1);
    return (std::popcount(lower) & 1) ? -1.0 : 1.0;
}

}  // namespace

// --- SectorBasis ---

SectorBasis SectorBasis::make(int M, int N) {
    if (M < 0 || M > 62 || N < 0 || N > M)
        throw std::invalid_argument("SectorBasis: bad (M,N)");
    SectorBasis b;
    b.M_ = M;
    b.N_ = N;
    if (N == 0) {
        b.words_ = {0};
        return b;
    }
    std::uint64_t w = (std::uint64_t{1} << N) - 1;
    const std::uint64_t limit = std::uint64_t{1} << M;
    while (w < limit) {
        b.words_.push_back(w);
        // Gosper's hack: next word with the same popcount
        std::uint64_t u = w & (~w + 1);
        std::uint64_t v = w + u;
        if (v == 0) break;
        w = v | (((w ^ v) / u) >> 2);
    }
    return b;
}

std::int64_t SectorBasis::index_of(std::uint64_t word) const {
    auto it = std::lower_bound(words_.begin(), words_.end(), word);
    if (it == words_.end() || *it != word) return -1;
    return it - words_.begin();
}

const std::vector<SectorBasis>& sector_bases(int M) {
    static std::mutex mtx;
    static std::map<int, std::vector<SectorBasis>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(M);
    if (it == cache.end()) {
        std::vector<SectorBasis> all;
        all.reserve(static_cast<size_t>(M) + 1);
        for (int N = 0; N <= M; ++N) all.push_back(SectorBasis::make(M, N));
        it = cache.emplace(M, std::move(all)).first;
    }
    return it->second;
}

// --- SectorOperator ---

SectorOperator::SectorOperator(ModesPtr modes, std::vector<SpMat> blocks, bool hermitian)
    : modes_(std::move(modes)), blocks_(std::move(blocks)), hermitian_(hermitian) {
    if (modes_ && blocks_.size() != static_cast<size_t>(modes_->M()) + 1)
        throw std::invalid_argument("SectorOperator: need one block per sector");
}

namespace {

// shared assembly core: off-diagonal quadratic terms plus diagonal monomials
SectorOperator assemble_blocks(ModesPtr modes, const std::vector<QuadTerm>& quads,
                               const std::vector<std::pair<std::vector<int>, double>>& monos,
                               bool hermitian) {
    const int M = modes->M();
    const auto& bases = sector_bases(M);
    std::vector<SpMat> blocks;
    blocks.reserve(bases.size());
    for (const auto& basis : bases) {
        const auto dim = basis.dim();
        std::vector<Eigen::Triplet<cplx>> trip;
        std::vector<cplx> diag(static_cast<size_t>(dim), cplx(0, 0));
        for (std::int64_t a = 0; a < dim; ++a) {
            const std::uint64_t w = basis.words()[static_cast<size_t>(a)];
            for (const auto& t : quads) {
                if (t.c == cplx(0, 0)) continue;
                const std::uint64_t bj = std::uint64_t{1} << t.j;
                const std::uint64_t bi = std::uint64_t{1} << t.i;
                if (!(w & bj)) continue;
                if (t.i == t.j) {
                    diag[static_cast<size_t>(a)] += t.c;
                    continue;
                }
                if (w & bi) continue;
                double sign = jw_sign(w, t.j);
                const std::uint64_t w1 = w & ~bj;
                sign *= jw_sign(w1, t.i);
                const std::int64_t b = basis.index_of(w1 | bi);
                trip.emplace_back(static_cast<int>(b), static_cast<int>(a), sign * t.c);
            }
            for (const auto& [bits, coef] : monos) {
                bool all = true;
                for (int k : bits)
                    if (!(w & (std::uint64_t{1} << k))) {
                        all = false;
                        break;
                    }
                if (all) diag[static_cast<size_t>(a)] += coef;
            }
        }
        for (std::int64_t a = 0; a < dim; ++a)
            if (diag[static_cast<size_t>(a)] != cplx(0, 0))
                trip.emplace_back(static_cast<int>(a), static_cast<int>(a),
                                  diag[static_cast<size_t>(a)]);
        SpMat blk(static_cast<int>(dim), static_cast<int>(dim));
        blk.setFromTriplets(trip.begin(), trip.end());
        blocks.push_back(std::move(blk));
    }
    return SectorOperator(std::move(modes), std::move(blocks), hermitian);
}

}  // namespace

SectorOperator assemble(const ModelSpec& spec, ModesPtr modes, int max_modes) {
    const int M = modes->M();
    if (M > max_modes)
        throw DimensionCapError("assemble: " + std::to_string(M) +
                                " modes exceed the cap of " + std::to_string(max_modes));
    std::vector<QuadTerm> quads;
    for (const auto& [x, y] : spec.hopping_pairs()) {
        const MatC T = spec.peierls(x, y);
        for (int i = 0; i < spec.s; ++i)
            for (int j = 0; j < spec.s; ++j)
                if (T(i, j) != cplx(0, 0))
                    quads.push_back({modes->mode(x, i), modes->mode(y, j), T(i, j)});
    }
    std::vector<std::pair<std::vector<int>, double>> monos;
    for (const auto& t : spec.instantiated_interactions()) {
        std::vector<int> bits;
        bits.reserve(t.modes.size());
        for (const auto& [x, j] : t.modes) bits.push_back(modes->mode(x, j));
        monos.emplace_back(std::move(bits), t.coef);
    }
    return assemble_blocks(std::move(modes), quads, monos, true);
}

SectorOperator assemble_quadratic(ModesPtr modes, const std::vector<QuadTerm>& terms,
                                  bool hermitian) {
    return assemble_blocks(std::move(modes), terms, {}, hermitian);
}

SectorOperator number_operator(const SiteSet& Z, ModesPtr modes) {
    std::uint64_t mask = 0;
    for (auto x : Z.sites())
        for (int j = 0; j < modes->s(); ++j)
            mask |= std::uint64_t{1} << modes->mode(x, j);
    const auto& bases = sector_bases(modes->M());
    std::vector<SpMat> blocks;
    blocks.reserve(bases.size());
    for (const auto& basis : bases) {
        const auto dim = basis.dim();
        std::vector<Eigen::Triplet<cplx>> trip;
        for (std::int64_t a = 0; a < dim; ++a) {
            const int n = std::popcount(basis.words()[static_cast<size_t>(a)] & mask);
            if (n) trip.emplace_back(static_cast<int>(a), static_cast<int>(a), cplx(n, 0));
        }
        SpMat blk(static_cast<int>(dim), static_cast<int>(dim));
        blk.setFromTriplets(trip.begin(), trip.end());
        blocks.push_back(std::move(blk));
    }
    return SectorOperator(std::move(modes), std::move(blocks), true);
}

SectorOperator i_commutator_with_diagonal(const SectorOperator& H,
                                          const SectorOperator& D) {
    if (!H.modes() || !D.modes() || !(*H.modes() == *D.modes()))
        throw EngineMismatchError("i_commutator_with_diagonal: mode index mismatch");
    std::vector<SpMat> blocks;
    blocks.reserve(H.blocks().size());
    for (size_t N = 0; N < H.blocks().size(); ++N) {
        const SpMat& h = H.blocks()[N];
        Eigen::VectorXcd d = D.blocks()[N].diagonal();
        std::vector<Eigen::Triplet<cplx>> trip;
        for (int col = 0; col < h.outerSize(); ++col)
            for (SpMat::InnerIterator it(h, col); it; ++it) {
                const cplx v = cplx(0, 1) * it.value() * (d(col) - d(it.row()));
                if (v != cplx(0, 0)) trip.emplace_back(it.row(), col, v);
            }
        SpMat blk(h.rows(), h.cols());
        blk.setFromTriplets(trip.begin(), trip.end());
        blocks.push_back(std::move(blk));
    }
    return SectorOperator(H.modes(), std::move(blocks), H.hermitian() && D.hermitian());
}

double max_abs_difference(const SectorOperator& A, const SectorOperator& B) {
    if (A.blocks().size() != B.blocks().size())
        throw EngineMismatchError("max_abs_difference: sector count mismatch");
    double worst = 0.0;
    for (size_t N = 0; N < A.blocks().size(); ++N) {
        SpMat diff = A.blocks()[N] - B.blocks()[N];
        for (int col = 0; col < diff.outerSize(); ++col)
            for (SpMat::InnerIterator it(diff, col); it; ++it)
                worst = std::max(worst, std::abs(it.value()));
    }
    return worst;
}

// --- spectrum and Gibbs functionals ---

SectorSpectrum diagonalize(const SectorOperator& H, bool with_vectors,
                           std::int64_t sector_cap) {
    if (!H.hermitian())
        throw ValidationError("diagonalize: operator is not flagged Hermitian");
    SectorSpectrum out;
    out.modes = H.modes();
    out.with_vectors = with_vectors;
    // report the largest sector, not the first offender
    size_t worst_N = 0;
    for (size_t N = 0; N < H.blocks().size(); ++N)
        if (H.blocks()[N].rows() > H.blocks()[worst_N].rows()) worst_N = N;
    if (!H.blocks().empty() && H.blocks()[worst_N].rows() > sector_cap)
        throw DimensionCapError(
            "diagonalize: sector N=" + std::to_string(worst_N) + " has dimension " +
            std::to_string(H.blocks()[worst_N].rows()) + ", above the cap of " +
            std::to_string(sector_cap));
    for (size_t N = 0; N < H.blocks().size(); ++N) {
        const SpMat& blk = H.blocks()[N];
        HermitianEigen eig = hermitian_eigen(Eigen::MatrixXcd(blk), with_vectors);
        out.eps.push_back(std::move(eig.values));
        out.vec.push_back(std::move(eig.vectors));
    }
    return out;
}

double log_partition_function(const SectorSpectrum& spec, ThermoParams p) {
    double shift = -std::numeric_limits<double>::infinity();
    for (size_t N = 0; N < spec.eps.size(); ++N)
        for (int i = 0; i < spec.eps[N].size(); ++i)
            shift = std::max(shift, -p.beta * (spec.eps[N](i) - p.mu * static_cast<double>(N)));
    if (!std::isfinite(shift)) throw std::invalid_argument("log_partition_function: empty spectrum");
    double acc = 0.0;
    for (size_t N = 0; N < spec.eps.size(); ++N)
        for (int i = 0; i < spec.eps[N].size(); ++i)
            acc += std::exp(-p.beta * (spec.eps[N](i) - p.mu * static_cast<double>(N)) - shift);
    return shift + std::log(acc);
}

namespace {

struct GibbsSums {
    cplx mean_A;    // <A>
    cplx mean_NA;   // <N_total A>
    double mean_N;  // <N_total>
};

// per-level diagonal matrix elements of A in the eigenbasis, Gibbs-weighted
GibbsSums gibbs_diagonal_sums(const SectorSpectrum& spec, const SectorOperator& A,
                              ThermoParams p) {
    if (!spec.with_vectors)
        throw std::logic_error("gibbs expectation: spectrum lacks eigenvectors");
    const double logZ = log_partition_function(spec, p);
    GibbsSums s{cplx(0, 0), cplx(0, 0), 0.0};
    for (size_t N = 0; N < spec.eps.size(); ++N) {
        if (spec.eps[N].size() == 0) continue;
        const Eigen::MatrixXcd& V = spec.vec[N];
        const Eigen::MatrixXcd AV = A.blocks()[N] * V;
        const Eigen::VectorXcd diag =
            (V.conjugate().cwiseProduct(AV)).colwise().sum().transpose();
        for (int i = 0; i < spec.eps[N].size(); ++i) {
            const double w =
                std::exp(-p.beta * (spec.eps[N](i) - p.mu * static_cast<double>(N)) - logZ);
            s.mean_A += w * diag(i);
            s.mean_NA += w * static_cast<double>(N) * diag(i);
            s.mean_N += w * static_cast<double>(N);
        }
    }
    return s;
}

}  // namespace

cplx gibbs_expectation(const SectorSpectrum& spec, const SectorOperator& A,
                       ThermoParams p) {
    return gibbs_diagonal_sums(spec, A, p).mean_A;
}

cplx gibbs_covariance(const SectorSpectrum& spec, const SectorOperator& A,
                      const SectorOperator& B, ThermoParams p) {
    if (!spec.with_vectors)
        throw std::logic_error("gibbs_covariance: spectrum lacks eigenvectors");
    const double logZ = log_partition_function(spec, p);
    cplx mean_AB(0, 0), mean_A(0, 0), mean_B(0, 0);
    for (size_t N = 0; N < spec.eps.size(); ++N) {
        if (spec.eps[N].size() == 0) continue;
        const Eigen::MatrixXcd& V = spec.vec[N];
        const Eigen::MatrixXcd AdV = A.blocks()[N].adjoint() * V;
        const Eigen::MatrixXcd BV = B.blocks()[N] * V;
        const Eigen::MatrixXcd AV = A.blocks()[N] * V;
        const Eigen::VectorXcd dA =
            (V.conjugate().cwiseProduct(AV)).colwise().sum().transpose();
        const Eigen::VectorXcd dB =
            (V.conjugate().cwiseProduct(BV)).colwise().sum().transpose();
        const Eigen::VectorXcd dAB =
            (AdV.conjugate().cwiseProduct(BV)).colwise().sum().transpose();
        for (int i = 0; i < spec.eps[N].size(); ++i) {
            const double w =
                std::exp(-p.beta * (spec.eps[N](i) - p.mu * static_cast<double>(N)) - logZ);
            mean_AB += w * dAB(i);
            mean_A += w * dA(i);
            mean_B += w * dB(i);
        }
    }
    return mean_AB - mean_A * mean_B;
}

double mu_derivative_expectation(const SectorSpectrum& spec, const SectorOperator& A,
                                 ThermoParams p) {
    GibbsSums s = gibbs_diagonal_sums(spec, A, p);
    return p.beta * (s.mean_NA - s.mean_N * s.mean_A).real();
}

double truncated_fluctuation_expectation(const SectorSpectrum& spec, const SiteSet& Z,
                                         const SectorOperator& A, ThermoParams p) {
    SectorOperator NZ = number_operator(Z, spec.modes);
    return p.beta * gibbs_covariance(spec, NZ, A, p).real();
}

// --- EdEngine ---

EdEngine::EdEngine(const ModelSpec& spec, std::int64_t sector_cap)
    : spec_(spec),
      modes_(std::make_shared<const ModeIndex>(spec.region, spec.s)),
      sector_cap_(sector_cap) {
    spec_.validate();
}

const SectorOperator& EdEngine::hamiltonian() {
    if (!assembled_) {
        H_ = assemble(spec_, modes_);
        assembled_ = true;
    }
    return H_;
}

const SectorSpectrum& EdEngine::spectrum() {
    if (!solved_) {
        spectrum_ = diagonalize(hamiltonian(), true, sector_cap_);
        solved_ = true;
    }
    return spectrum_;
}

double EdEngine::log_Z(ThermoParams p) { return log_partition_function(spectrum(), p); }

double EdEngine::expectation(const SectorOperator& A, ThermoParams p) {
    return gibbs_expectation(spectrum(), A, p).real();
}

double EdEngine::covariance(const SectorOperator& A, const SectorOperator& B,
                            ThermoParams p) {
    return gibbs_covariance(spectrum(), A, B, p).real();
}

}  // namespace maglat
