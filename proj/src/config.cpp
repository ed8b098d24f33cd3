#include "maglat/config.hpp"

#include "maglat/cache.hpp"
#include "maglat/scenario.hpp"

#include <algorithm>

namespace maglat {

ModelSpec ModelConfig::instantiate(int L) const {
    ModelSpec spec;
    if (preset == "hofstadter_hubbard")
        spec = hofstadter_hubbard(L, b, U);
    else if (preset == "hofstadter")
        spec = hofstadter(L, b);
    else if (preset == "spinless_tv")
        spec = spinless_tv(L, b, t, V);
    else
        throw ValidationError("model preset must be one of hofstadter_hubbard/"
                              "hofstadter/spinless_tv, got \"" + preset + "\"");

    std::vector<std::pair<Site, double>> dressing;
    if (edge_rows) {
        for (int row : edge_rows->rows)
            for (auto x : spec.region.sites())
                if (x.x2 == row) dressing.push_back({x, edge_rows->phi});
    }
    dressing.insert(dressing.end(), edge_sites.begin(), edge_sites.end());
    if (!dressing.empty()) {
        int width = spec.D;
        for (const auto& [x, phi] : dressing) {
            if (!spec.region.contains(x))
                throw ValidationError("edge potential site is outside the region");
            width = std::max(width, distance_to_complement(x, spec.region));
        }
        spec.D = width;
        spec = add_edge_potential(spec, dressing);
    }
    return spec;
}

namespace {

Json model_to_json(const ModelConfig& m) {
    Json j;
    j["preset"] = m.preset;
    j["b"] = m.b;
    j["U"] = m.U;
    j["t"] = m.t;
    j["V"] = m.V;
    if (m.edge_rows) {
        j["edge_rows"]["rows"] = m.edge_rows->rows;
        j["edge_rows"]["phi"] = m.edge_rows->phi;
    }
    if (!m.edge_sites.empty()) {
        Json arr = Json::array();
        for (const auto& [x, phi] : m.edge_sites) {
            Json e;
            e["site"] = {x.x1, x.x2};
            e["phi"] = phi;
            arr.push_back(e);
        }
        j["edge_sites"] = arr;
    }
    return j;
}

ModelConfig model_from_json(const Json& j) {
    ModelConfig m;
    if (!j.contains("preset") || !j["preset"].is_string())
        throw ValidationError("model needs a string field \"preset\"");
    m.preset = j["preset"].get<std::string>();
    m.b = j.value("b", 0.0);
    m.U = j.value("U", 0.0);
    m.t = j.value("t", 1.0);
    m.V = j.value("V", 0.0);
    if (j.contains("edge_rows")) {
        ModelConfig::EdgeRows er;
        er.rows = j["edge_rows"].at("rows").get<std::vector<int>>();
        er.phi = j["edge_rows"].at("phi").get<double>();
        m.edge_rows = er;
    }
    if (j.contains("edge_sites")) {
        for (const auto& e : j["edge_sites"]) {
            const auto xy = e.at("site").get<std::vector<int>>();
            if (xy.size() != 2)
                throw ValidationError("edge_sites entries need a two-component \"site\"");
            m.edge_sites.push_back({Site{xy[0], xy[1]}, e.at("phi").get<double>()});
        }
    }
    return m;
}

}  // namespace

Json to_json(const ScenarioConfig& c) {
    Json j;
    j["format_version"] = c.format_version;
    j["scenario"] = c.scenario;
    j["model"] = model_to_json(c.model);
    if (c.model_b) j["model_b"] = model_to_json(*c.model_b);
    j["engine"] = engine_name(c.engine);
    j["L"] = c.L;
    j["beta"] = c.beta;
    j["mu"] = c.mu;
    if (!c.depths.empty()) j["depths"] = c.depths;
    j["column"] = c.column;
    j["fd_step"] = c.fd_step;
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    if (c.center) j["center"] = {c.center->x1, c.center->x2};
    if (!c.radii.empty()) j["radii"] = c.radii;
    return j;
}

ScenarioConfig scenario_from_json(const Json& j) {
    ScenarioConfig c;
    c.format_version = j.value("format_version", 1);
    if (c.format_version != 1)
        throw ValidationError("format_version must be 1, got " +
                              std::to_string(c.format_version));
    if (!j.contains("scenario") || !j["scenario"].is_string())
        throw ValidationError("config needs a string field \"scenario\"");
    c.scenario = j["scenario"].get<std::string>();
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), c.scenario) == names.end())
        throw ValidationError("unknown scenario \"" + c.scenario + "\"");
    if (!j.contains("model")) throw ValidationError("config needs a \"model\" object");
    c.model = model_from_json(j["model"]);
    if (j.contains("model_b")) c.model_b = model_from_json(j["model_b"]);
    c.engine = parse_engine(j.value("engine", std::string("auto")));
    c.L = j.value("L", std::vector<int>{});
    if (c.L.empty()) throw ValidationError("config needs a nonempty list \"L\"");
    c.beta = j.value("beta", std::vector<double>{});
    if (c.beta.empty()) throw ValidationError("config needs a nonempty list \"beta\"");
    c.mu = j.value("mu", std::vector<double>{});
    if (c.mu.empty()) throw ValidationError("config needs a nonempty list \"mu\"");
    c.depths = j.value("depths", std::vector<int>{});
    c.column = j.value("column", 0);
    c.fd_step = j.value("fd_step", 1e-4);
    if (c.fd_step <= 0) throw ValidationError("fd_step must be positive");
    c.seed = j.value("seed", std::uint64_t{1});
    c.samples = j.value("samples", 4);
    if (c.samples < 0) throw ValidationError("samples must be >= 0");
    if (j.contains("center")) {
        const auto xy = j["center"].get<std::vector<int>>();
        if (xy.size() != 2)
            throw ValidationError("center must be a two-component site");
        c.center = Site{xy[0], xy[1]};
    }
    c.radii = j.value("radii", std::vector<int>{});
    if (c.scenario == "edge_independence" && !c.model_b)
        throw ValidationError("edge_independence needs a \"model_b\" variant");
    if (c.scenario == "indistinguishability" && (!c.center || c.radii.empty()))
        throw ValidationError("indistinguishability needs \"center\" and \"radii\"");
    if ((c.scenario == "edge_independence" || c.scenario == "mu_derivative" ||
         c.scenario == "magnetization_gap") &&
        c.depths.empty())
        throw ValidationError("scenario \"" + c.scenario +
                              "\" needs a nonempty list \"depths\"");
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    return scenario_from_json(read_json(path));
}

void save_config(const ScenarioConfig& c, const std::filesystem::path& path) {
    write_json(path, to_json(c));
}

std::uint64_t config_hash(const ScenarioConfig& c) {
    return fnv1a(dump_json(to_json(c), 0));
}

}  // namespace maglat
