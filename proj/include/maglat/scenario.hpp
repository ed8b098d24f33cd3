#pragma once

// Scenario driver: runs one configured experiment across its parameter
// lists, writes a JSON report (and CSV current fields where natural), and
// optionally refreshes the regression baseline next to the config.

#include "maglat/config.hpp"
#include "maglat/report.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace maglat {

struct RunOptions {
    std::optional<Engine> engine;  // CLI override of the config engine
    std::filesystem::path out_dir = "out";
    bool update_baselines = false;
    std::optional<std::filesystem::path> baseline_path;  // default: alongside config
    int jobs = 1;  // linear-algebra worker threads
    std::optional<std::uint64_t> seed;  // CLI override
};

struct ScenarioResult {
    Json report;
    std::vector<std::filesystem::path> written;
    bool checks_ok = true;       // scenario-internal identities held
    std::string failure_detail;  // first violated check, empty when ok
};

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& opts);

const std::vector<std::string>& scenario_names();

// applies --jobs: caps the BLAS/LAPACK thread pool
void set_worker_threads(int jobs);

}  // namespace maglat
