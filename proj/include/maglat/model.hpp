#pragma once

// The Hamiltonian family: bulk/edge hoppings with Peierls phase, density-type
// interactions, presets, restriction, boundary potentials, and magnetic
// translations.
//
//   H = sum_{x,y} a*_x T_b(x,y) a_y + sum_X Phi(X)
//   T_b(x,y) = exp(i b (x2+y2)/2 (x1-y1)) T(x,y)
//
// Interactions are real-coefficient products of on-site number operators, so
// they commute with every local number operator by construction.

#include "maglat/errors.hpp"
#include "maglat/lattice.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace maglat {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;

// Peierls phase attached to the ordered pair (x,y)
cplx peierls_phase(double b, Site x, Site y);

// Hopping amplitudes T(x,y) without the Peierls phase. A bulk map stores
// displacement-indexed s x s matrices (T depends only on x-y); an edge map
// stores site-pair-indexed matrices. Hermitian pairing T(x,y) = T(y,x)* is
// maintained by the setters and checked by validate().
class HoppingMap {
  public:
    HoppingMap() = default;
    HoppingMap(int R, int s) : R_(R), s_(s) {}

    // displacement d = x - y; stores T at d and T^dagger at -d
    void set_displacement(Site d, const MatC& T);
    // stores T at (x,y) and T^dagger at (y,x)
    void set_pair(Site x, Site y, const MatC& T);

    MatC amplitude(Site x, Site y) const;  // zero matrix when absent
    bool nonzero(Site x, Site y) const;
    bool empty() const { return by_displacement_.empty() && by_pair_.empty(); }

    const std::map<Site, MatC>& displacement_terms() const { return by_displacement_; }
    const std::map<std::pair<Site, Site>, MatC>& pair_terms() const { return by_pair_; }

    int range() const { return R_; }
    int internal_dim() const { return s_; }

    // max over stored matrices of the operator norm (largest singular value)
    double max_amplitude_norm() const;

    void validate() const;  // Hermitian pairing, range, matrix shapes

  private:
    int R_ = 0;
    int s_ = 1;
    std::map<Site, MatC> by_displacement_;
    std::map<std::pair<Site, Site>, MatC> by_pair_;
};

// One product of number operators: coef * prod_{(x,j)} n_{x,j}.
// Internal index j runs 0..s-1. For a bulk family the sites are offsets
// relative to an anchor; for an edge list they are absolute.
struct NumberMonomial {
    std::vector<std::pair<Site, int>> modes;
    double coef = 0.0;

    int diameter() const;  // max pairwise 1-distance of the involved sites
    int degree() const { return static_cast<int>(modes.size()); }
};

class DensityInteraction {
  public:
    DensityInteraction() = default;
    explicit DensityInteraction(std::vector<NumberMonomial> terms)
        : terms_(std::move(terms)) {}

    void add(NumberMonomial t) { terms_.push_back(std::move(t)); }
    const std::vector<NumberMonomial>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

  private:
    std::vector<NumberMonomial> terms_;
};

enum class Part { bulk, edge };

struct TranslationMap {
    Site y;
    double b = 0.0;

    Site apply(Site x) const { return x + y; }
    // phase multiplying the mode at site x (any internal index):
    // a*_{x} -> exp(i b y2 x1) a*_{x+y}
    cplx phase(Site x) const;
};

class ModelSpec {
  public:
    SiteSet region;
    double b = 0.0;
    int s = 1;
    int D = 1;  // edge strip width, >= hopping/interaction range
    HoppingMap bulk_hopping;   // displacement-indexed
    HoppingMap edge_hopping;   // pair-indexed, support near the boundary
    DensityInteraction bulk_interaction;  // offset-form monomials
    DensityInteraction edge_interaction;  // absolute-site monomials

    int range() const;  // max range over all hopping/interaction parts
    void validate() const;  // throws ValidationError

    // amplitude/Peierls element of the full T = T^bulk + T^edge
    MatC hopping_amplitude(Site x, Site y) const;
    bool has_hopping(Site x, Site y) const;
    MatC peierls(Site x, Site y) const;

    // all ordered pairs (x,y), both in region, with nonzero amplitude
    // (includes x == y when an on-site quadratic term is present)
    std::vector<std::pair<Site, Site>> hopping_pairs() const;

    // bulk families anchored at every region site (kept only when the whole
    // support lands in the region) plus the edge terms inside the region
    std::vector<NumberMonomial> instantiated_interactions() const;

    // true when every instantiated interaction monomial has degree <= 1,
    // i.e. the Hamiltonian is quadratic and the free engine applies
    bool quadratic() const;
};

// s x s Peierls element exp(i b (x2+y2)/2 (x1-y1)) * T(x,y)
MatC peierls_element(const HoppingMap& T, double b, Site x, Site y);

// --- presets ---

// Hofstadter-Hubbard on Lambda_L: s=2, identity nearest-neighbour hopping,
// on-site U n_{x,0} n_{x,1}, no edge terms.
ModelSpec hofstadter_hubbard(int L, double b, double U);

// Magnetic Laplacian on Lambda_L: s=1, nearest-neighbour hopping 1. The
// free-engine workhorse (the U=0 Hofstadter-Hubbard model is two decoupled
// copies of this).
ModelSpec hofstadter(int L, double b);

// Spinless t-V model on Lambda_L: s=1, nearest-neighbour hopping t and
// density-density V n_x n_y on nearest-neighbour pairs. The desk-scale
// interacting model.
ModelSpec spinless_tv(int L, double b, double t, double V);

// --- operations ---

// Keep hopping pairs with both endpoints in sub, interaction terms with
// support inside sub. Idempotent. Throws unless sub is a subset of region.
ModelSpec restrict_to(const ModelSpec& spec, const SiteSet& sub);

// Append single-site density terms phi(x) * N_x to the edge interaction
// (one monomial per internal index). Every support site must lie within
// distance D of the region's complement; this covers the lower strip
// Z x {0..D-1} and the four-side boundary ring.
ModelSpec add_edge_potential(const ModelSpec& spec,
                             const std::vector<std::pair<Site, double>>& phi);

// Cancel every hopping attached to the given boundary sites by adding the
// opposite amplitude to the edge hopping map (bulk tables untouched, so the
// sites become hopping-decoupled). Sites must lie within distance D of the
// region's complement. The result still validates.
ModelSpec mask_site_hoppings(const ModelSpec& spec, const std::vector<Site>& sites);

// Magnetic translation by y: mode map (x,j) -> (x+y,j), phase exp(i b y2 x1).
TranslationMap magnetic_translation(const ModelSpec& spec, Site y);

// C_H^{part} = sup_x ( 2 sum_y ||T^part(x,y)||_op
//                      + sum_{terms t with x in supp t} |coef_t| ) + mu,
// sup over region sites, hopping norms as matrix operator norms.
double local_norm_constant(const ModelSpec& spec, double mu, Part part);

}  // namespace maglat
