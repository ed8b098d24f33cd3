#pragma once

// Quasi-free route: for quadratic Hamiltonians every Gibbs observable is a
// functional of the one-body matrix h. Correlations come from the Fermi
// function of h, quadratic observables from traces against the correlation
// matrix, covariances from Wick pairing, and the pressure from the
// single-particle spectrum.

#include "maglat/errors.hpp"
#include "maglat/fock.hpp"
#include "maglat/model.hpp"
#include "maglat/modes.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace maglat {

struct OneBodyMatrix {
    ModesPtr modes;
    Eigen::MatrixXcd h;  // M x M Hermitian
};

// Builds h from hoppings (Peierls elements) plus degree-1 density terms on
// the diagonal. Throws EngineMismatchError when an interaction monomial has
// degree >= 2.
OneBodyMatrix one_body(const ModelSpec& spec);

struct OneBodySpectrum {
    ModesPtr modes;
    Eigen::VectorXd eps;
    Eigen::MatrixXcd V;  // columns are eigenvectors
};

// V is left empty when with_vectors is false (pressure-only workloads)
OneBodySpectrum one_body_spectrum(const OneBodyMatrix& h, bool with_vectors = true);

// Correlation matrix with the index convention G(j,i) = <a*_i a_j>,
// i.e. G = (1 + exp(beta (h - mu)))^{-1} evaluated spectrally.
struct CorrelationMatrix {
    ModesPtr modes;
    Eigen::MatrixXcd G;
};

CorrelationMatrix fermi_correlations(const OneBodySpectrum& spec, ThermoParams p);

// d/dmu G = beta V diag(f (1 - f)) V*
CorrelationMatrix fermi_derivative_correlations(const OneBodySpectrum& spec,
                                                ThermoParams p);

// <sum_t c_t a*_{i_t} a_{j_t}> = sum_t c_t G(j_t, i_t)
cplx quadratic_expectation(const CorrelationMatrix& G,
                           const std::vector<QuadTerm>& terms);

// Wick covariance <A B> - <A><B> for quadratic A, B:
// sum_{t in A, u in B} cA_t cB_u G(l_u, i_t) (delta_{j_t k_u} - G(j_t, k_u))
cplx quadratic_covariance(const CorrelationMatrix& G, const std::vector<QuadTerm>& A,
                          const std::vector<QuadTerm>& B);

// log Z = sum_k log(1 + exp(-beta (eps_k - mu))), summed with the stable
// softplus; the caller normalizes to a pressure
double free_log_partition_function(const Eigen::VectorXd& eps, ThermoParams p);

// Caches the one-body spectrum; correlation matrices are derived per params.
class FreeEngine {
  public:
    explicit FreeEngine(const ModelSpec& spec);  // throws EngineMismatchError

    const ModesPtr& modes() const { return modes_; }
    const ModelSpec& spec() const { return spec_; }
    const OneBodySpectrum& spectrum();  // with eigenvectors

    double log_Z(ThermoParams p);
    const CorrelationMatrix& correlations(ThermoParams p);
    double expectation(const std::vector<QuadTerm>& A, ThermoParams p);
    double covariance(const std::vector<QuadTerm>& A, const std::vector<QuadTerm>& B,
                      ThermoParams p);
    // beta Cov(N_Z, A) via Wick pairing with the number operator on Z
    double truncated_fluctuation(const SiteSet& Z, const std::vector<QuadTerm>& A,
                                 ThermoParams p);
    double mu_derivative(const std::vector<QuadTerm>& A, ThermoParams p);

  private:
    void ensure_spectrum(bool need_vectors);

    ModelSpec spec_;
    ModesPtr modes_;
    bool have_eps_ = false;  // eigenvalues-only solve done
    bool have_vec_ = false;  // full solve done
    OneBodySpectrum spectrum_;
    // keyed by exact (beta, mu); map nodes keep returned references valid
    std::map<std::pair<double, double>, CorrelationMatrix> corr_;
};

// number operator on Z as quadratic terms (for Wick covariances)
std::vector<QuadTerm> number_terms(const SiteSet& Z, const ModeIndex& modes);

}  // namespace maglat
