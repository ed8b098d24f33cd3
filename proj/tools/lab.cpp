// lab: command line front end for the scenario driver.
//
//   lab run <config.json> [--engine ed|free|auto] [--out DIR]
//                         [--update-baselines] [--jobs N] [--seed S]
//   lab compare <report.json> <baseline.json>
//
// run executes one scenario config and writes its report (plus CSV current
// fields where the scenario produces them) under --out. With
// --update-baselines the regression baseline is rewritten next to the
// config as <config stem>.baseline.json. compare checks a report against a
// baseline and exits nonzero on any mismatch.

#include "maglat/errors.hpp"
#include "maglat/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace maglat;

namespace {

constexpr const char* kUsage =
    "usage: lab run <config.json> [--engine ed|free|auto] [--out DIR]\n"
    "               [--update-baselines] [--jobs N] [--seed S]\n"
    "       lab compare <report.json> <baseline.json>\n";

void print_summary(const Json& report) {
    if (!report.contains("summary")) return;
    for (const auto& [key, value] : report["summary"].items()) {
        std::cout << "  " << key << " = ";
        if (value.is_number())
            std::cout << format_double(value.get<double>());
        else
            std::cout << value.dump();
        std::cout << "\n";
    }
}

int cmd_run(const fs::path& config_path, const RunOptions& opts) {
    const ScenarioConfig cfg = load_config(config_path);
    const ScenarioResult res = run_scenario(cfg, opts);

    std::cout << "scenario " << cfg.scenario << ": "
              << (res.checks_ok ? "checks ok" : "CHECK FAILED") << "\n";
    print_summary(res.report);
    for (const auto& p : res.written) std::cout << "wrote " << p.string() << "\n";

    if (!res.checks_ok) {
        std::cerr << "check failed: " << res.failure_detail << "\n";
        return 1;
    }
    return 0;
}

int cmd_compare(const fs::path& report_path, const fs::path& baseline_path) {
    const Json report = read_json(report_path);
    const Json baseline = read_json(baseline_path);
    const CompareResult res = compare_reports(report, baseline);

    if (!res.error.empty()) {
        std::cerr << "error: " << res.error << "\n";
        return 1;
    }
    for (const auto& c : res.checks)
        std::cout << (c.pass ? "   ok " : " FAIL ") << c.key << " got "
                  << format_double(c.got) << " want " << format_double(c.want) << "\n";
    std::cout << res.passed << "/" << res.checks.size() << " checks passed\n";
    return res.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc <= 1) {
        std::cerr << kUsage;
        return 2;
    }

    CLI::App app{"scenario runner for lattice fermion experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string engine_str;
    std::string out_dir = "out";
    bool update_baselines = false;
    int jobs = 1;
    std::uint64_t seed = 0;

    CLI::App* run = app.add_subcommand("run", "run one scenario config");
    run->add_option("config", config_path, "scenario config JSON")->required();
    CLI::Option* engine_opt =
        run->add_option("--engine", engine_str, "engine override: ed, free or auto");
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_flag("--update-baselines", update_baselines,
                  "rewrite <config stem>.baseline.json next to the config");
    run->add_option("--jobs", jobs, "linear-algebra worker threads")
        ->check(CLI::PositiveNumber);
    CLI::Option* seed_opt = run->add_option("--seed", seed, "sampling seed override");

    std::string report_path;
    std::string baseline_path;
    CLI::App* compare = app.add_subcommand("compare", "check a report against a baseline");
    compare->add_option("report", report_path, "report JSON")->required();
    compare->add_option("baseline", baseline_path, "baseline JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            RunOptions opts;
            if (engine_opt->count() > 0) opts.engine = parse_engine(engine_str);
            opts.out_dir = out_dir;
            opts.update_baselines = update_baselines;
            if (update_baselines) {
                fs::path base = config_path;
                base.replace_extension();
                opts.baseline_path = fs::path(base.string() + ".baseline.json");
            }
            opts.jobs = jobs;
            if (seed_opt->count() > 0) opts.seed = seed;
            return cmd_run(config_path, opts);
        }
        return cmd_compare(report_path, baseline_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
