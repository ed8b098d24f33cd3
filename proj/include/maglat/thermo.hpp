#pragma once

// Gibbs-state observables and the identity reports built from them:
// pressure, magnetization by three routes, edge currents, mu-derivative
// identities, five-region decomposition, indistinguishability of local
// observables between a box and a ball, and edge/bulk pressure comparison.

#include "maglat/currents.hpp"
#include "maglat/fock.hpp"
#include "maglat/free_fermion.hpp"
#include "maglat/model.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace maglat {

enum class Engine { ed, free, auto_select };

Engine resolve_engine(const ModelSpec& spec, Engine requested);  // auto: free iff quadratic
const char* engine_name(Engine e);
Engine parse_engine(const std::string& name);  // "ed" | "free" | "auto"

// One surface over both engines for log Z and quadratic observables. The
// underlying spectra are memoized, so mu/beta scans and finite differences in
// mu are cheap reweightings.
class AnyEngine {
  public:
    AnyEngine(const ModelSpec& spec, Engine kind);

    Engine kind() const { return kind_; }
    const ModelSpec& spec() const;
    ModesPtr modes() const;

    double log_Z(ThermoParams p);
    double expectation(const std::vector<QuadTerm>& A, ThermoParams p);
    double covariance(const std::vector<QuadTerm>& A, const std::vector<QuadTerm>& B,
                      ThermoParams p);
    // beta Cov(N_Z, A)
    double truncated_fluctuation(const SiteSet& Z, const std::vector<QuadTerm>& A,
                                 ThermoParams p);
    // beta Cov(N_region, A)
    double mu_derivative(const std::vector<QuadTerm>& A, ThermoParams p);

    EdEngine* ed();          // nullptr when the free engine is active
    FreeEngine* free_eng();  // nullptr when the ED engine is active

  private:
    Engine kind_;
    std::unique_ptr<EdEngine> ed_;
    std::unique_ptr<FreeEngine> free_;
};

CurrentField current_field(AnyEngine& eng, ThermoParams p);

// p = -(beta |region|)^{-1} log Z
double pressure(AnyEngine& eng, ThermoParams p);
double pressure(const ModelSpec& spec, ThermoParams p, Engine kind);

// --- magnetization ---

// m = dp/db by three routes: centered finite difference of the pressure in
// b, the Duhamel form <dH/db>/|region|, and the weighted current sum
// sum_{m,n} n j_1^{(m,n)} / |region|.
struct MagnetizationReport {
    double m_fd = 0.0;
    double m_duhamel = 0.0;
    double m_current_sum = 0.0;
    double fd_step = 0.0;
    int column = 0;
    std::map<int, double> edge_currents;  // depth d -> I^d
    double gap_fd_duhamel = 0.0;
    double gap_duhamel_current = 0.0;
};

MagnetizationReport magnetization(const ModelSpec& spec, ThermoParams p, Engine kind,
                                  double fd_step, const std::vector<int>& depths,
                                  int column = 0);

// Duhamel route only (no field rebuilds); cheap path for scans
double magnetization_duhamel(AnyEngine& eng, ThermoParams p);

// --- mu-derivative identities ---

struct MuDerivativeReport {
    double fd_step = 0.0;
    int d = 1;
    int column = 0;
    // magnetization (Duhamel observable): covariance route vs central FD
    double dmu_m_cov = 0.0;
    double dmu_m_fd = 0.0;
    double m_rel_gap = 0.0;
    // edge current I^d: covariance route vs central FD
    double dmu_I_cov = 0.0;
    double dmu_I_fd = 0.0;
    double I_rel_gap = 0.0;
    // the localization gap between the two derivatives
    double gap_m_vs_I = 0.0;
    // sanity anchor: d p / d mu = -<N>/|region|
    double dp_dmu_fd = 0.0;
    double minus_density = 0.0;
    double gap_pressure = 0.0;
};

MuDerivativeReport mu_derivative_report(const ModelSpec& spec, ThermoParams p,
                                        Engine kind, double fd_step, int d,
                                        int column = 0);

// --- five-region decomposition of the weighted current sum ---

// Partial sums of n j_1 / |region| over the five masks; the five values add
// up to the current-sum magnetization exactly.
struct FiveRegionReport {
    int d = 1;
    double left = 0.0;
    double right = 0.0;
    double bottom = 0.0;
    double top = 0.0;
    double bulk = 0.0;
    double total = 0.0;  // sum of the five
    std::map<std::string, int> counts;
};

FiveRegionReport five_region_report(const CurrentField& field, int d);

// --- local observables and indistinguishability ---

struct LocalObservable {
    enum class Kind { number, current };
    Kind kind = Kind::number;
    SiteSet X;               // number: N_X
    DualEdge e{};            // current: J_e
    SiteSet support(const ModelSpec& spec) const;
    std::vector<QuadTerm> quad_terms(const ModelSpec& spec, const ModeIndex& modes) const;
    std::string name() const;
};

// Same local observable evaluated in the Gibbs state of the full model and
// of the model restricted to a subregion; the gap decays in the buffer
// distance. Both buffer distances are recorded: to the whole-plane
// complement of the subregion and to region minus subregion.
struct IndistinguishabilityReport {
    std::string observable;
    double value_full = 0.0;
    double value_sub = 0.0;
    double gap = 0.0;
    int dist_to_sub_complement = 0;                 // dist(supp A, Z^2 \ sub)
    std::optional<int> dist_to_region_minus_sub;    // nullopt when sub = region
};

IndistinguishabilityReport indistinguishability_gap(const ModelSpec& full,
                                                    ThermoParams p, Engine kind,
                                                    const SiteSet& sub,
                                                    const LocalObservable& A);

// expectation of the current through one dual edge
double current_expectation(AnyEngine& eng, DualEdge e, ThermoParams p);

// --- truncated fluctuation locality ---

// beta Cov(N_{Z_l}, A) against beta Cov(N_region, A) for growing balls
struct FluctuationLocalityReport {
    std::string observable;
    std::vector<int> radii;
    std::vector<double> truncated;
    double full = 0.0;
    std::vector<double> gaps;
};

FluctuationLocalityReport fluctuation_locality(const ModelSpec& spec, ThermoParams p,
                                               Engine kind, const LocalObservable& A,
                                               Site center, const std::vector<int>& radii);

// --- edge independence of the distant edge current ---

// A and B share bulk data and differ in edge terms near the bottom rows;
// the bottom edge current difference is controlled by column conservation:
// |I_A - I_B| <= sum_{middle rows} (|j_A| + |j_B|) + sum_{top d rows} |j_A - j_B|
struct EdgeIndependenceReport {
    int d = 1;
    int column = 0;
    double I_A = 0.0;
    double I_B = 0.0;
    double gap = 0.0;
    double measured_bound = 0.0;
};

EdgeIndependenceReport edge_independence_gap(const ModelSpec& A, const ModelSpec& B,
                                             ThermoParams p, Engine kind, int d,
                                             int column = 0);

// --- edge/bulk pressure comparison ---

// Pressure of the edged model on Lambda_L against the bare-bulk model on the
// centered box B_L; the gap is bounded by C_H^edge D / (2L+1).
struct BulkPressureReport {
    double p_edge_model = 0.0;
    double p_bulk_model = 0.0;
    double gap = 0.0;
    double bound = 0.0;
};

BulkPressureReport bulk_pressure_comparison(const ModelSpec& spec, ThermoParams p,
                                            Engine kind);

}  // namespace maglat
