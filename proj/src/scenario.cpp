#include "maglat/scenario.hpp"

#include "maglat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

extern "C" void openblas_set_num_threads(int);

namespace maglat {

void set_worker_threads(int jobs) {
    if (jobs >= 1) openblas_set_num_threads(jobs);
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "continuity",     "conservation",  "bloch",
        "magnetization_gap", "edge_independence", "mu_derivative",
        "indistinguishability", "bulk_pressure", "engine_equivalence"};
    return names;
}

namespace {

namespace fs = std::filesystem;

std::uint64_t splitmix(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Ctx {
    const ScenarioConfig& cfg;
    Engine engine;
    std::uint64_t seed;
    fs::path out_dir;
    std::vector<fs::path> written;
    bool ok = true;
    std::string detail;

    void check(bool cond, const std::string& what) {
        if (ok && !cond) {
            ok = false;
            detail = what;
        }
    }
};

Json site_json(Site x) { return Json::array({x.x1, x.x2}); }

void write_field_csv(Ctx& ctx, const CurrentField& field, int run_index) {
    const fs::path path = ctx.out_dir / ("field_run" + std::to_string(run_index) + ".csv");
    write_current_field_csv(path, field);
    ctx.written.push_back(path);
}

std::vector<Site> sample_sites(const SiteSet& region, int count, std::uint64_t& rng) {
    std::vector<Site> out;
    if (count >= static_cast<int>(region.size())) return region.sites();
    std::set<Site> seen;
    while (static_cast<int>(out.size()) < count) {
        Site s = region.sites()[splitmix(rng) % region.size()];
        if (seen.insert(s).second) out.push_back(s);
    }
    return out;
}

SiteSet random_connected_region(const SiteSet& region, int target, std::uint64_t& rng) {
    std::set<Site, RowMajorLess> cur;
    cur.insert(region.sites()[splitmix(rng) % region.size()]);
    while (static_cast<int>(cur.size()) < target) {
        std::vector<Site> frontier;
        for (auto x : cur)
            for (Site d : {Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}}) {
                Site y = x + d;
                if (region.contains(y) && !cur.count(y)) frontier.push_back(y);
            }
        if (frontier.empty()) break;
        std::sort(frontier.begin(), frontier.end(), RowMajorLess{});
        frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
        cur.insert(frontier[splitmix(rng) % frontier.size()]);
    }
    return SiteSet::of({cur.begin(), cur.end()});
}

// --- scenario bodies; each returns the "runs" array and fills "summary" ---

Json run_continuity(Ctx& ctx, Json& summary) {
    Json runs = Json::array();
    std::uint64_t rng = ctx.seed;
    double worst = 0.0;
    for (int L : ctx.cfg.L) {
        const ModelSpec spec = ctx.cfg.model.instantiate(L);
        EdEngine eng(spec);
        Json entry;
        entry["L"] = L;
        entry["engine"] = "ed";
        Json sites = Json::array(), residuals = Json::array();
        double local = 0.0;
        for (Site z : sample_sites(spec.region, ctx.cfg.samples, rng)) {
            const double r = divergence_residual(eng, z);
            sites.push_back(site_json(z));
            residuals.push_back(r);
            local = std::max(local, r);
        }
        entry["sites"] = sites;
        entry["residuals"] = residuals;
        entry["worst"] = local;
        runs.push_back(entry);
        worst = std::max(worst, local);
    }
    summary["worst_residual"] = worst;
    ctx.check(worst <= 1e-12, "continuity residual " + format_double(worst) +
                                  " exceeds 1e-12");
    return runs;
}

Json run_conservation(Ctx& ctx, Json& summary) {
    Json runs = Json::array();
    std::uint64_t rng = ctx.seed;
    double worst = 0.0;
    int run_index = 0;
    for (int L : ctx.cfg.L)
        for (double beta : ctx.cfg.beta)
            for (double mu : ctx.cfg.mu) {
                const ModelSpec spec = ctx.cfg.model.instantiate(L);
                AnyEngine eng(spec, ctx.engine);
                const ThermoParams p{beta, mu};
                const CurrentField field = current_field(eng, p);

                double local = 0.0;
                auto probe = [&](const SiteSet& Z) {
                    local = std::max(local,
                                     std::abs(conservation_sum(field, Z, spec.region)));
                };
                for (Site z : spec.region.sites()) probe(SiteSet::of({z}));
                for (int c = -L; c < L; ++c) {
                    std::vector<Site> strip;
                    for (Site z : spec.region.sites())
                        if (z.x1 <= c) strip.push_back(z);
                    probe(SiteSet::of(std::move(strip)));
                }
                probe(SiteSet::ball_in({0, L}, (L + 1) / 2, spec.region));
                for (int s = 0; s < ctx.cfg.samples; ++s)
                    probe(random_connected_region(spec.region,
                                                  3 + static_cast<int>(splitmix(rng) % 6),
                                                  rng));

                Json entry;
                entry["L"] = L;
                entry["beta"] = beta;
                entry["mu"] = mu;
                entry["engine"] = engine_name(resolve_engine(spec, ctx.engine));
                entry["worst"] = local;
                runs.push_back(entry);
                worst = std::max(worst, local);
                write_field_csv(ctx, field, run_index++);
            }
    summary["worst_violation"] = worst;
    ctx.check(worst <= 1e-9, "conservation violation " + format_double(worst) +
                                 " exceeds 1e-9");
    return runs;
}

Json run_bloch(Ctx& ctx, Json& summary) {
    Json runs = Json::array();
    Json thetas = Json::array(), rates = Json::array();
    double worst_column = 0.0;
    int run_index = 0;
    for (int L : ctx.cfg.L)
        for (double beta : ctx.cfg.beta)
            for (double mu : ctx.cfg.mu) {
                const ModelSpec spec = ctx.cfg.model.instantiate(L);
                AnyEngine eng(spec, ctx.engine);
                const CurrentField field = current_field(eng, {beta, mu});
                const DecayProfile prof = bloch_profile(field);
                const ThetaBound theta = theta_bound(prof, L, spec.range(), spec.D);

                double col = 0.0;
                for (int c = -L; c < L; ++c) {
                    double acc = 0.0;
                    for (int n = 0; n <= 2 * L; ++n) acc += field.at(1, c, n);
                    col = std::max(col, std::abs(acc));
                }
                worst_column = std::max(worst_column, col);

                Json entry;
                entry["L"] = L;
                entry["beta"] = beta;
                entry["mu"] = mu;
                entry["engine"] = engine_name(resolve_engine(spec, ctx.engine));
                entry["shell_max"] = prof.shell_max;
                entry["shell_count"] = prof.shell_count;
                entry["envelope_rate"] = prof.envelope_rate;
                entry["envelope_intercept"] = prof.envelope_intercept;
                entry["theta"] = theta.theta;
                entry["theta_best_d"] = theta.best_d;
                entry["theta_C"] = theta.C;
                entry["worst_column_sum"] = col;
                runs.push_back(entry);
                thetas.push_back(theta.theta);
                rates.push_back(prof.envelope_rate);
                write_field_csv(ctx, field, run_index++);
            }
    summary["worst_column_sum"] = worst_column;
    summary["thetas"] = thetas;
    summary["envelope_rates"] = rates;
    ctx.check(worst_column <= 1e-9, "column sum " + format_double(worst_column) +
                                        " breaks conservation");
    return runs;
}

Json run_magnetization_gap(Ctx& ctx, Json& summary) {
    Json runs = Json::array();
    double worst_identity = 0.0, worst_fd = 0.0;
    Json duhamels = Json::array();
    for (int L : ctx.cfg.L)
        for (double beta : ctx.cfg.beta)
            for (double mu : ctx.cfg.mu) {
                const ModelSpec spec = ctx.cfg.model.instantiate(L);
                const MagnetizationReport rep =
                    magnetization(spec, {beta, mu}, ctx.engine, ctx.cfg.fd_step,
                                  ctx.cfg.depths, ctx.cfg.column);
                Json entry;
                entry["L"] = L;
                entry["beta"] = beta;
                entry["mu"] = mu;
                entry["engine"] = engine_name(resolve_engine(spec, ctx.engine));
                entry["m_fd"] = rep.m_fd;
                entry["m_duhamel"] = rep.m_duhamel;
                entry["m_current_sum"] = rep.m_current_sum;
                entry["fd_step"] = rep.fd_step;
                entry["gap_fd_duhamel"] = rep.gap_fd_duhamel;
                entry["gap_duhamel_current"] = rep.gap_duhamel_current;
                Json ec = Json::object();
                for (const auto& [d, I] : rep.edge_currents)
                    ec[std::to_string(d)] = I;
                entry["edge_currents"] = ec;
                runs.push_back(entry);
                duhamels.push_back(rep.m_duhamel);
                worst_identity = std::max(worst_identity, rep.gap_duhamel_current);
                worst_fd = std::max(worst_fd, rep.gap_fd_duhamel);
            }
    summary["max_gap_duhamel_current"] = worst_identity;
    summary["max_gap_fd_duhamel"] = worst_fd;
    summary["m_duhamel"] = duhamels;
    ctx.check(worst_identity <= 1e-9, "duhamel and current-sum routes differ by " +
                                          format_double(worst_identity));
    const double fd_tol = 1e3 * ctx.cfg.fd_step * ctx.cfg.fd_step + 1e-9;
    ctx.check(worst_fd <= fd_tol, "finite-difference magnetization off by " +
                                      format_double(worst_fd));
    return runs;
}

Json run_edge_independence(Ctx& ctx, Json& summary) {
    Json runs = Json::array();
    Json gaps = Json::array(), bounds = Json::array();
    for (int L : ctx.cfg.L) {
        const ModelSpec A = ctx.cfg.model.instantiate(L);
        const ModelSpec B = ctx.cfg.model_b->instantiate(L);
        for (double beta : ctx.cfg.beta)
            for (double mu : ctx.cfg.mu)
                for (int d : ctx.cfg.depths) {
                    const EdgeIndependenceReport rep = edge_independence_gap(
                        A, B, {beta, mu}, ctx.engine, d, ctx.cfg.column);
                    Json entry;
                    entry["L"] = L;
                    entry["beta"] = beta;
                    entry["mu"] = mu;
                    entry["d"] = d;
                    entry["column"] = rep.column;
                    entry["I_A"] = rep.I_A;
                    entry["I_B"] = rep.I_B;
                    entry["gap"] = rep.gap;
                    entry["measured_bound"] = rep.measured_bound;
                    runs.push_back(entry);
                    gaps.push_back(rep.gap);
                    bounds.push_back(rep.measured_bound);
                    ctx.check(rep.gap <= rep.measured_bound + 1e-12,
                              "edge current gap " + format_double(rep.gap) +
                                  " exceeds its conservation bound " +
                                  format_double(rep.measured_bound));
                }
    }
    summary["gaps"] = gaps;
    summary["measured_bounds"] = bounds;
    return runs;
}

Json run_mu_derivative(Ctx& ctx, Json& summary) {
    Json runs = Json::array();
    double worst_m = 0.0, worst_I = 0.0, worst_p = 0.0;
    Json m_vs_I = Json::array();
    for (int L : ctx.cfg.L)
        for (double beta : ctx.cfg.beta)
            for (double mu : ctx.cfg.mu)
                for (int d : ctx.cfg.depths) {
                    const ModelSpec spec = ctx.cfg.model.instantiate(L);
                    const MuDerivativeReport rep = mu_derivative_report(
                        spec, {beta, mu}, ctx.engine, ctx.cfg.fd_step, d, ctx.cfg.column);
                    Json entry;
                    entry["L"] = L;
                    entry["beta"] = beta;
                    entry["mu"] = mu;
                    entry["d"] = d;
                    entry["engine"] = engine_name(resolve_engine(spec, ctx.engine));
                    entry["dmu_m_cov"] = rep.dmu_m_cov;
                    entry["dmu_m_fd"] = rep.dmu_m_fd;
                    entry["m_rel_gap"] = rep.m_rel_gap;
                    entry["dmu_I_cov"] = rep.dmu_I_cov;
                    entry["dmu_I_fd"] = rep.dmu_I_fd;
                    entry["I_rel_gap"] = rep.I_rel_gap;
                    entry["gap_m_vs_I"] = rep.gap_m_vs_I;
                    entry["dp_dmu_fd"] = rep.dp_dmu_fd;
                    entry["minus_density"] = rep.minus_density;
                    entry["gap_pressure"] = rep.gap_pressure;
                    runs.push_back(entry);
                    worst_m = std::max(worst_m, rep.m_rel_gap);
                    worst_I = std::max(worst_I, rep.I_rel_gap);
                    worst_p = std::max(worst_p, rep.gap_pressure);
                    m_vs_I.push_back(rep.gap_m_vs_I);
                }
    summary["worst_m_rel_gap"] = worst_m;
    summary["worst_I_rel_gap"] = worst_I;
    summary["worst_pressure_gap"] = worst_p;
    summary["gap_m_vs_I"] = m_vs_I;
    ctx.check(worst_m <= 1e-4, "mu-derivative of m: covariance vs FD rel gap " +
                                   format_double(worst_m));
    ctx.check(worst_I <= 1e-4, "mu-derivative of I: covariance vs FD rel gap " +
                                   format_double(worst_I));
    ctx.check(worst_p <= 1e-6, "pressure mu-derivative anchor off by " +
                                   format_double(worst_p));
    return runs;
}

Json run_indistinguishability(Ctx& ctx, Json& summary) {
    Json runs = Json::array();
    Json gaps_number = Json::array(), gaps_current = Json::array();
    const Site center = *ctx.cfg.center;
    for (int L : ctx.cfg.L)
        for (double beta : ctx.cfg.beta)
            for (double mu : ctx.cfg.mu) {
                const ModelSpec spec = ctx.cfg.model.instantiate(L);
                const ThermoParams p{beta, mu};
                LocalObservable num{LocalObservable::Kind::number,
                                    SiteSet::of({center}), {}};
                LocalObservable cur{LocalObservable::Kind::current, SiteSet(),
                                    DualEdge{1, center}};
                for (const LocalObservable& A : {num, cur}) {
                    Json series = Json::array();
                    for (int r : ctx.cfg.radii) {
                        const SiteSet sub = SiteSet::ball_in(center, r, spec.region);
                        const IndistinguishabilityReport rep =
                            indistinguishability_gap(spec, p, ctx.engine, sub, A);
                        Json e;
                        e["radius"] = r;
                        e["value_full"] = rep.value_full;
                        e["value_sub"] = rep.value_sub;
                        e["gap"] = rep.gap;
                        e["dist_to_sub_complement"] = rep.dist_to_sub_complement;
                        if (rep.dist_to_region_minus_sub)
                            e["dist_to_region_minus_sub"] = *rep.dist_to_region_minus_sub;
                        series.push_back(e);
                        (A.kind == LocalObservable::Kind::number ? gaps_number
                                                                 : gaps_current)
                            .push_back(rep.gap);
                    }
                    // identity anchor: restricting to the full region changes nothing
                    const IndistinguishabilityReport same =
                        indistinguishability_gap(spec, p, ctx.engine, spec.region, A);
                    ctx.check(same.gap <= 1e-12,
                              "restriction to the full region moved " + A.name() +
                                  " by " + format_double(same.gap));
                    Json entry;
                    entry["L"] = L;
                    entry["beta"] = beta;
                    entry["mu"] = mu;
                    entry["observable"] = A.name();
                    entry["center"] = site_json(center);
                    entry["series"] = series;
                    entry["full_region_gap"] = same.gap;
                    runs.push_back(entry);
                }
            }
    summary["gaps_number"] = gaps_number;
    summary["gaps_current"] = gaps_current;
    return runs;
}

Json run_bulk_pressure(Ctx& ctx, Json& summary) {
    Json runs = Json::array();
    Json gaps = Json::array(), bounds = Json::array();
    for (int L : ctx.cfg.L)
        for (double beta : ctx.cfg.beta)
            for (double mu : ctx.cfg.mu) {
                const ModelSpec spec = ctx.cfg.model.instantiate(L);
                const BulkPressureReport rep =
                    bulk_pressure_comparison(spec, {beta, mu}, ctx.engine);
                Json entry;
                entry["L"] = L;
                entry["beta"] = beta;
                entry["mu"] = mu;
                entry["engine"] = engine_name(resolve_engine(spec, ctx.engine));
                entry["p_edge_model"] = rep.p_edge_model;
                entry["p_bulk_model"] = rep.p_bulk_model;
                entry["gap"] = rep.gap;
                entry["bound"] = rep.bound;
                runs.push_back(entry);
                gaps.push_back(rep.gap);
                bounds.push_back(rep.bound);
                ctx.check(rep.gap <= rep.bound + 1e-12,
                          "pressure gap " + format_double(rep.gap) +
                              " exceeds the edge bound " + format_double(rep.bound));
            }
    summary["gaps"] = gaps;
    summary["bounds"] = bounds;
    return runs;
}

Json run_engine_equivalence(Ctx& ctx, Json& summary) {
    Json runs = Json::array();
    double worst = 0.0;
    for (int L : ctx.cfg.L)
        for (double beta : ctx.cfg.beta)
            for (double mu : ctx.cfg.mu) {
                const ModelSpec spec = ctx.cfg.model.instantiate(L);
                const ThermoParams p{beta, mu};
                AnyEngine ed(spec, Engine::ed);
                AnyEngine fr(spec, Engine::free);

                const double d_logZ = std::abs(ed.log_Z(p) - fr.log_Z(p));
                const auto N = number_terms(spec.region, *ed.modes());
                const double d_N = std::abs(ed.expectation(N, p) - fr.expectation(N, p));
                const auto dHdb = field_derivative_terms(spec, *ed.modes());
                const double d_dmu =
                    std::abs(ed.mu_derivative(dHdb, p) - fr.mu_derivative(dHdb, p));
                const CurrentField fe = current_field(ed, p);
                const CurrentField ff = current_field(fr, p);
                double d_field = 0.0;
                for (const auto& [e, v] : fe.j)
                    d_field = std::max(d_field, std::abs(v - ff.at(e)));

                Json entry;
                entry["L"] = L;
                entry["beta"] = beta;
                entry["mu"] = mu;
                entry["gap_log_Z"] = d_logZ;
                entry["gap_number"] = d_N;
                entry["gap_mu_derivative"] = d_dmu;
                entry["gap_current_field"] = d_field;
                runs.push_back(entry);
                const double local = std::max({d_logZ, d_N, d_dmu, d_field});
                worst = std::max(worst, local);
                ctx.check(local <= 1e-10, "engines disagree by " + format_double(local));
            }
    summary["worst_gap"] = worst;
    return runs;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& opts) {
    set_worker_threads(opts.jobs);
    fs::create_directories(opts.out_dir);

    Ctx ctx{config,
            opts.engine ? *opts.engine : config.engine,
            opts.seed ? *opts.seed : config.seed,
            opts.out_dir,
            {},
            true,
            {}};

    Json report;
    report["scenario"] = config.scenario;
    report["config_hash"] = std::to_string(config_hash(config));
    report["engine"] = engine_name(ctx.engine);
    report["seed"] = ctx.seed;
    Json summary = Json::object();
    Json runs;

    if (config.scenario == "continuity")
        runs = run_continuity(ctx, summary);
    else if (config.scenario == "conservation")
        runs = run_conservation(ctx, summary);
    else if (config.scenario == "bloch")
        runs = run_bloch(ctx, summary);
    else if (config.scenario == "magnetization_gap")
        runs = run_magnetization_gap(ctx, summary);
    else if (config.scenario == "edge_independence")
        runs = run_edge_independence(ctx, summary);
    else if (config.scenario == "mu_derivative")
        runs = run_mu_derivative(ctx, summary);
    else if (config.scenario == "indistinguishability")
        runs = run_indistinguishability(ctx, summary);
    else if (config.scenario == "bulk_pressure")
        runs = run_bulk_pressure(ctx, summary);
    else if (config.scenario == "engine_equivalence")
        runs = run_engine_equivalence(ctx, summary);
    else
        throw ValidationError("unknown scenario \"" + config.scenario + "\"");

    report["runs"] = runs;
    report["summary"] = summary;
    report["checks_ok"] = ctx.ok;
    if (!ctx.ok) report["failure_detail"] = ctx.detail;

    const fs::path report_path = opts.out_dir / "report.json";
    write_json(report_path, report);

    ScenarioResult res;
    res.report = report;
    res.written.push_back(report_path);
    for (auto& p : ctx.written) res.written.push_back(p);
    res.checks_ok = ctx.ok;
    res.failure_detail = ctx.detail;

    if (opts.update_baselines) {
        const fs::path base_path =
            opts.baseline_path ? *opts.baseline_path : opts.out_dir / "baseline.json";
        const Json base = make_baseline(report, config.scenario, config_hash(config),
                                        {"/summary"}, 1e-9, 1e-6);
        write_json(base_path, base);
        res.written.push_back(base_path);
    }
    return res;
}

}  // namespace maglat
