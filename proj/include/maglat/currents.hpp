#pragma once

// Bond currents through dual-lattice edges. The current operator through a
// dual edge collects every hopping pair whose straight segment crosses the
// edge, with weight 1 for an interior crossing and 1/2 when the segment
// passes through an endpoint of the edge, signed by the hop direction:
//
//   J^z_k = sum_{(x,y) crossing} i * sgn(x_k - y_k) * w(x,y) a*_x T_b(x,y) a_y
//
// The (x,y) <-> (y,x) pairing makes each J Hermitian. Site-level continuity
// i [H, N_z] = J_1^z - J_1^{z-e1} + J_2^z - J_2^{z-e2} holds exactly.

#include "maglat/fock.hpp"
#include "maglat/free_fermion.hpp"
#include "maglat/lattice.hpp"
#include "maglat/model.hpp"

#include <map>
#include <vector>

namespace maglat {

struct CurrentTerm {
    Site x;
    Site y;
    double weight = 1.0;  // 1 interior, 1/2 endpoint
    int sign = 1;         // sgn(x_k - y_k)
};

struct CurrentCoefficients {
    DualEdge e;
    std::vector<CurrentTerm> terms;
};

// Hopping pairs of the model crossing the dual edge. Empty when the edge is
// out of reach of the region.
CurrentCoefficients current_coefficients(const ModelSpec& spec, DualEdge e);

// i * sign * weight * T_b(x,y) expanded over internal indices
std::vector<QuadTerm> current_quad_terms(const ModelSpec& spec, const ModeIndex& modes,
                                         DualEdge e);

// dH/db = sum_{x,y} i (x2+y2)/2 (x1-y1) a*_x T_b(x,y) a_y, as quadratic
// terms; identical to sum_n n J_1^{(m,n)} summed over vertical dual edges
std::vector<QuadTerm> field_derivative_terms(const ModelSpec& spec,
                                             const ModeIndex& modes);

// Gibbs expectation values of every dual-edge current of a box region.
struct CurrentField {
    int L = 0;
    int R = 1;
    int D = 1;
    double b = 0.0;
    ThermoParams params;
    std::map<DualEdge, double> j;

    double at(DualEdge e) const;  // throws std::out_of_range when absent
    double at(int k, int z1, int z2) const;
};

CurrentField current_field(EdEngine& eng, ThermoParams p);
CurrentField current_field(FreeEngine& eng, ThermoParams p);

// max over sectors and matrix entries of i[H, N_z] minus the four-edge
// current divergence at z; exact-zero identity up to roundoff
double divergence_residual(EdEngine& eng, Site z);

// sum of sign * j over dual_edge_boundary(Z, ambient); zero by continuity
double conservation_sum(const CurrentField& field, const SiteSet& Z,
                        const SiteSet& ambient);

// I^d = -sum_{n=0}^{d-1} j_1^{(column, n)}: current through the bottom d
// dual edges of the vertical line at x1 = column + 1/2, oriented in the
// circulation sense of the boundary loop. With this orientation the deep
// edge current reproduces the b-derivative of the pressure in large boxes.
double edge_current(const CurrentField& field, int d, int column = 0);

// Shell-resolved decay of |j|: shell r = min over the crossed bond's
// endpoints of the site distance to the region complement.
struct DecayProfile {
    std::vector<double> shell_max;  // index r-1 holds shell r
    std::vector<int> shell_count;
    double envelope_rate = 0.0;       // least-squares slope of log max vs r
    double envelope_intercept = 0.0;  // over strictly positive entries
};

int shell_distance(DualEdge e, int L);
DecayProfile bloch_profile(const CurrentField& field);

// theta(L) = 2C min_{R+D <= d <= L} ( 2 d^2 / L + sum_{n >= d-R-D} zeta(n) )
// with C the largest shell maximum, zeta(n) = shell_max(n)/C, zeta clamped
// to its first value for n <= 0 and to zero past the last measured shell
struct ThetaBound {
    double theta = 0.0;
    int best_d = 0;
    double C = 0.0;
};

// the bound evaluated at one fixed d: 2C (2d^2/L + tail sum)
double theta_objective(const DecayProfile& prof, int L, int R, int D, int d);
ThetaBound theta_bound(const DecayProfile& prof, int L, int R, int D);

}  // namespace maglat
