#pragma once

// Exact diagonalization in occupation-number sectors. Hoppings and density
// interactions conserve total particle number, so every operator here is
// stored as one sparse block per sector N = 0..M. Fermionic signs follow the
// frozen mode order of ModeIndex (Jordan-Wigner string over lower modes).

#include "maglat/errors.hpp"
#include "maglat/model.hpp"
#include "maglat/modes.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <vector>

namespace maglat {

struct ThermoParams {
    double beta = 1.0;
    double mu = 0.0;
};

struct QuadTerm {
    int i = 0;
    int j = 0;
    cplx c;  // c * a*_i a_j
};

using SpMat = Eigen::SparseMatrix<cplx>;

// Occupation words with N bits set among M modes, ascending as integers.
class SectorBasis {
  public:
    static SectorBasis make(int M, int N);

    int M() const { return M_; }
    int N() const { return N_; }
    std::int64_t dim() const { return static_cast<std::int64_t>(words_.size()); }
    const std::vector<std::uint64_t>& words() const { return words_; }
    std::int64_t index_of(std::uint64_t word) const;  // -1 when absent

  private:
    int M_ = 0;
    int N_ = 0;
    std::vector<std::uint64_t> words_;
};

// Shared, lazily built bases for all sectors of M modes.
const std::vector<SectorBasis>& sector_bases(int M);

class SectorOperator {
  public:
    SectorOperator() = default;
    SectorOperator(ModesPtr modes, std::vector<SpMat> blocks, bool hermitian);

    const ModesPtr& modes() const { return modes_; }
    int M() const { return modes_ ? modes_->M() : 0; }
    const SpMat& block(int N) const { return blocks_.at(static_cast<size_t>(N)); }
    const std::vector<SpMat>& blocks() const { return blocks_; }
    bool hermitian() const { return hermitian_; }

  private:
    ModesPtr modes_;
    std::vector<SpMat> blocks_;
    bool hermitian_ = false;
};

// Full Hamiltonian of the model: Peierls hoppings plus interaction
// monomials. Throws DimensionCapError when M exceeds max_modes.
SectorOperator assemble(const ModelSpec& spec, ModesPtr modes, int max_modes = 26);

// sum_t c_t a*_{i_t} a_{j_t}; hermitian flag is taken at face value
SectorOperator assemble_quadratic(ModesPtr modes, const std::vector<QuadTerm>& terms,
                                  bool hermitian);

// N_Z = sum over modes with site in Z of the number operator (diagonal)
SectorOperator number_operator(const SiteSet& Z, ModesPtr modes);

// i [H, D] for diagonal D, computed entrywise: (i H)_{ab} (d_b - d_a)
SectorOperator i_commutator_with_diagonal(const SectorOperator& H,
                                          const SectorOperator& D);

// max over sectors of the largest |entry| of A - B
double max_abs_difference(const SectorOperator& A, const SectorOperator& B);

struct SectorSpectrum {
    ModesPtr modes;
    std::vector<Eigen::VectorXd> eps;   // per sector, ascending
    std::vector<Eigen::MatrixXcd> vec;  // per sector; empty when not requested
    bool with_vectors = false;
};

// Dense Hermitian solve per sector. Throws DimensionCapError when a sector
// dimension exceeds sector_cap.
SectorSpectrum diagonalize(const SectorOperator& H, bool with_vectors = true,
                           std::int64_t sector_cap = 20000);

// log Z at (beta, mu): log sum over sectors N and levels i of
// exp(-beta (eps_i - mu N)), evaluated with the log-sum-exp shift
double log_partition_function(const SectorSpectrum& spec, ThermoParams p);

// tr(rho A); requires eigenvectors in the spectrum
cplx gibbs_expectation(const SectorSpectrum& spec, const SectorOperator& A,
                       ThermoParams p);

// <A B> - <A><B> for sector-block operators (real for commuting Hermitian
// pairs such as number operators vs. Hermitian observables)
cplx gibbs_covariance(const SectorSpectrum& spec, const SectorOperator& A,
                      const SectorOperator& B, ThermoParams p);

// d/dmu tr(rho A) = beta Cov(N_total, A), from the same spectrum
double mu_derivative_expectation(const SectorSpectrum& spec, const SectorOperator& A,
                                 ThermoParams p);

// beta Cov(N_Z, A): the finite-volume fluctuation pairing restricted to Z
double truncated_fluctuation_expectation(const SectorSpectrum& spec,
                                         const SiteSet& Z, const SectorOperator& A,
                                         ThermoParams p);

// Assembles and diagonalizes once per model, reuses the spectrum across all
// (beta, mu) since only the Gibbs weights depend on them.
class EdEngine {
  public:
    explicit EdEngine(const ModelSpec& spec, std::int64_t sector_cap = 20000);

    const ModesPtr& modes() const { return modes_; }
    const ModelSpec& spec() const { return spec_; }
    const SectorOperator& hamiltonian();
    const SectorSpectrum& spectrum();

    double log_Z(ThermoParams p);
    double expectation(const SectorOperator& A, ThermoParams p);  // real part, Hermitian A
    double covariance(const SectorOperator& A, const SectorOperator& B, ThermoParams p);

  private:
    ModelSpec spec_;
    ModesPtr modes_;
    std::int64_t sector_cap_;
    bool assembled_ = false;
    SectorOperator H_;
    bool solved_ = false;
    SectorSpectrum spectrum_;
};

}  // namespace maglat
