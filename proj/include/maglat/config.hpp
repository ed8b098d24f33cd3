#pragma once

// JSON run configuration: a model family (preset plus modifications) and a
// scenario with its parameter lists. Doubles survive a save/load round trip
// bit exactly.

#include "maglat/model.hpp"
#include "maglat/report.hpp"
#include "maglat/thermo.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace maglat {

// Model family; L comes from the scenario so one config can sweep sizes.
struct ModelConfig {
    std::string preset;  // hofstadter_hubbard | hofstadter | spinless_tv
    double b = 0.0;
    double U = 0.0;  // hofstadter_hubbard
    double t = 1.0;  // spinless_tv
    double V = 0.0;  // spinless_tv

    // edge potential phi(x) N_x: constant value on whole rows, or per site
    struct EdgeRows {
        std::vector<int> rows;
        double phi = 0.0;
    };
    std::optional<EdgeRows> edge_rows;
    std::vector<std::pair<Site, double>> edge_sites;

    ModelSpec instantiate(int L) const;  // throws ValidationError on bad preset
};

struct ScenarioConfig {
    int format_version = 1;
    std::string scenario;  // continuity | conservation | bloch | magnetization_gap |
                           // edge_independence | mu_derivative | indistinguishability |
                           // bulk_pressure | engine_equivalence
    ModelConfig model;
    std::optional<ModelConfig> model_b;  // edge_independence: second edge dressing
    Engine engine = Engine::auto_select;
    std::vector<int> L;
    std::vector<double> beta;
    std::vector<double> mu;
    std::vector<int> depths;  // d values
    int column = 0;
    double fd_step = 1e-4;
    std::uint64_t seed = 1;
    int samples = 4;  // random probes per size (continuity/conservation)

    // indistinguishability / fluctuation locality geometry
    std::optional<Site> center;
    std::vector<int> radii;
};

Json to_json(const ScenarioConfig& c);
ScenarioConfig scenario_from_json(const Json& j);  // throws ValidationError
ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const ScenarioConfig& c, const std::filesystem::path& path);

// FNV-1a over the canonical serialized form; identifies a config in reports
// and baselines
std::uint64_t config_hash(const ScenarioConfig& c);

}  // namespace maglat
