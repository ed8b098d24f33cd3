#include <doctest.h>

#include "maglat/report.hpp"
#include "maglat/scenario.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace maglat;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::path("scenario_test_tmp") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioConfig conservation_config() {
    ScenarioConfig c;
    c.scenario = "conservation";
    c.model.preset = "hofstadter";
    c.model.b = 2 * M_PI * 0.15;
    c.L = {3};
    c.beta = {2.0};
    c.mu = {0.0};
    c.samples = 5;
    c.seed = 7;
    return c;
}

struct CmdResult {
    int code = -1;
    std::string out;
    std::string err;
};

CmdResult run_cmd(const std::string& cmd, const fs::path& dir) {
    fs::path so = dir / "stdout.txt", se = dir / "stderr.txt";
    std::string full = cmd + " >" + so.string() + " 2>" + se.string();
    int status = std::system(full.c_str());
    CmdResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
}

const char* lab_bin() { return std::getenv("MAGLAT_LAB_BIN"); }

}  // namespace

TEST_CASE("doubles survive the JSON round trip bit exactly") {
    for (double v : {M_PI, 1.0 / 3.0, 2 * M_PI * 0.15, 6.02214076e23, 1e-17,
                     -0.1234567890123456789, 0.0}) {
        std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }

    Json j;
    j["a"] = 1.0 / 3.0;
    j["nested"]["b"] = std::vector<double>{M_PI, 0.7};
    auto dir = fresh_dir("roundtrip");
    write_json(dir / "x.json", j);
    Json back = read_json(dir / "x.json");
    CHECK(back["a"].get<double>() == 1.0 / 3.0);
    CHECK(back["nested"]["b"][0].get<double>() == M_PI);
}

TEST_CASE("scenario config round trips and hashes stably") {
    auto c = conservation_config();
    c.model.edge_rows = ModelConfig::EdgeRows{{0, 1}, 0.7};
    c.model.edge_sites = {{{0, 0}, -0.3}};
    c.mu = {-0.123456789012345678, 1.0 / 7.0};

    auto dir = fresh_dir("config");
    save_config(c, dir / "c.json");
    auto back = load_config(dir / "c.json");

    CHECK(back.scenario == c.scenario);
    CHECK(back.model.b == c.model.b);
    CHECK(back.mu == c.mu);
    CHECK(back.seed == c.seed);
    CHECK(back.model.edge_rows->rows == c.model.edge_rows->rows);
    CHECK(back.model.edge_rows->phi == c.model.edge_rows->phi);
    CHECK(back.model.edge_sites == c.model.edge_sites);
    CHECK(to_json(back) == to_json(c));
    CHECK(config_hash(back) == config_hash(c));

    auto other = c;
    other.model.b = c.model.b + 1e-15;
    CHECK(config_hash(other) != config_hash(c));
    auto renamed = c;
    renamed.scenario = "bloch";
    CHECK(config_hash(renamed) != config_hash(c));
}

TEST_CASE("config validation names the offending field") {
    Json j = to_json(conservation_config());
    j["scenario"] = "mystery";
    try {
        (void)scenario_from_json(j);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("scenario") != std::string::npos);
    }

    Json bad_engine = to_json(conservation_config());
    bad_engine["engine"] = "warp";
    CHECK_THROWS_AS((void)scenario_from_json(bad_engine), ValidationError);

    Json wrong_version = to_json(conservation_config());
    wrong_version["format_version"] = 99;
    CHECK_THROWS_AS((void)scenario_from_json(wrong_version), ValidationError);

    auto c = conservation_config();
    c.model.preset = "unknown";
    CHECK_THROWS_AS((void)c.model.instantiate(2), ValidationError);
}

TEST_CASE("model config instantiation applies edge dressing") {
    ModelConfig mc;
    mc.preset = "hofstadter";
    mc.b = 0.4;
    mc.edge_rows = ModelConfig::EdgeRows{{0, 1}, 0.7};
    auto spec = mc.instantiate(4);
    CHECK(spec.region.size() == 81);
    CHECK(spec.D >= 2);
    int terms = 0;
    for (const auto& t : spec.instantiated_interactions())
        if (t.degree() == 1) ++terms;
    CHECK(terms == 18);  // two full rows of 9 columns

    ModelConfig tv;
    tv.preset = "spinless_tv";
    tv.b = 0.9;
    tv.t = 1.0;
    tv.V = 0.7;
    CHECK(!tv.instantiate(1).quadratic());
}

TEST_CASE("current field CSV is deterministic and ordered") {
    FreeEngine eng(hofstadter(1, 0.6));
    auto field = current_field(eng, {1.0, 0.0});
    auto dir = fresh_dir("csv");
    write_current_field_csv(dir / "f.csv", field);
    std::string text = slurp(dir / "f.csv");
    CHECK(text.substr(0, text.find('\n')) == "k,z1,z2,j,shell");
    size_t rows = static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(rows == field.j.size() + 1);
    write_current_field_csv(dir / "g.csv", field);
    CHECK(slurp(dir / "g.csv") == text);
}

TEST_CASE("baseline comparison separates drift from structure") {
    Json report;
    report["scenario"] = "conservation";
    report["config_hash"] = "42";
    report["values"]["worst"] = 1e-12;
    report["values"]["series"] = std::vector<double>{1.0, 2.0};

    Json base = make_baseline(report, "conservation", 42,
                              {"/values/worst", "/values/series"}, 1e-9, 0.0);
    auto ok = compare_reports(report, base);
    CHECK(ok.ok);
    CHECK(ok.error.empty());
    CHECK(ok.passed == static_cast<int>(ok.checks.size()));
    CHECK(ok.checks.size() == 3);  // worst + two series entries

    Json drift = report;
    drift["values"]["series"][1] = 2.5;
    auto bad = compare_reports(drift, base);
    CHECK(!bad.ok);
    CHECK(bad.error.empty());
    bool found = false;
    for (const auto& ch : bad.checks)
        if (!ch.pass) {
            found = true;
            CHECK(ch.key == "/values/series/1");
            CHECK(ch.want == 2.0);
            CHECK(ch.got == 2.5);
        }
    CHECK(found);

    // hash mismatch is a structural error, not value drift
    Json other = report;
    other["config_hash"] = "43";
    auto mism = compare_reports(other, base);
    CHECK(!mism.ok);
    CHECK(mism.error.find("config_hash") != std::string::npos);

    Json missing = report;
    missing["values"].erase("worst");
    auto gone = compare_reports(missing, base);
    CHECK(!gone.ok);
    CHECK(gone.error.find("/values/worst") != std::string::npos);
}

TEST_CASE("scenario catalogue is complete") {
    const auto& names = scenario_names();
    for (const char* n :
         {"continuity", "conservation", "bloch", "magnetization_gap",
          "edge_independence", "mu_derivative", "indistinguishability",
          "bulk_pressure", "engine_equivalence"})
        CHECK(std::count(names.begin(), names.end(), std::string(n)) == 1);
    CHECK(names.size() == 9);
}

TEST_CASE("every scenario runs, self-checks, and is deterministic") {
    std::vector<ScenarioConfig> configs;

    {
        ScenarioConfig c;
        c.scenario = "continuity";
        c.model.preset = "hofstadter";
        c.model.b = 1.0;
        c.L = {1};
        c.beta = {1.0};
        c.mu = {0.0};
        configs.push_back(c);
    }
    configs.push_back(conservation_config());
    {
        ScenarioConfig c;
        c.scenario = "bloch";
        c.model.preset = "hofstadter";
        c.model.b = 2 * M_PI * 0.15;
        c.L = {6};
        c.beta = {2.0};
        c.mu = {0.0};
        configs.push_back(c);
    }
    {
        ScenarioConfig c;
        c.scenario = "magnetization_gap";
        c.model.preset = "hofstadter";
        c.model.b = 0.6;
        c.L = {2, 3};
        c.beta = {1.3};
        c.mu = {0.1};
        c.fd_step = 1e-5;
        c.depths = {1, 2};
        configs.push_back(c);
    }
    {
        ScenarioConfig c;
        c.scenario = "edge_independence";
        c.model.preset = "hofstadter";
        c.model.b = 2 * M_PI * 0.15;
        c.model.edge_rows = ModelConfig::EdgeRows{{0, 1}, 0.7};
        c.model_b = c.model;
        c.model_b->edge_rows.reset();
        c.L = {5};
        c.beta = {2.0};
        c.mu = {0.0};
        c.depths = {4};
        configs.push_back(c);
    }
    {
        ScenarioConfig c;
        c.scenario = "mu_derivative";
        c.model.preset = "spinless_tv";
        c.model.b = 0.9;
        c.model.t = 1.0;
        c.model.V = 0.7;
        c.L = {1};
        c.beta = {1.0};
        c.mu = {0.2};
        c.depths = {1};
        configs.push_back(c);
    }
    {
        ScenarioConfig c;
        c.scenario = "indistinguishability";
        c.model.preset = "hofstadter";
        c.model.b = 0.5;
        c.L = {4};
        c.beta = {0.25};
        c.mu = {0.0};
        c.center = Site{0, 4};
        c.radii = {2, 3, 4};
        configs.push_back(c);
    }
    {
        ScenarioConfig c;
        c.scenario = "bulk_pressure";
        c.model.preset = "hofstadter";
        c.model.b = 0.6;
        c.model.edge_rows = ModelConfig::EdgeRows{{0}, 0.5};
        c.L = {3, 5};
        c.beta = {1.0};
        c.mu = {0.2};
        configs.push_back(c);
    }
    {
        ScenarioConfig c;
        c.scenario = "engine_equivalence";
        c.model.preset = "hofstadter";
        c.model.b = 0.7;
        c.L = {1};
        c.beta = {1.2};
        c.mu = {0.3};
        configs.push_back(c);
    }

    for (const auto& c : configs) {
        CAPTURE(c.scenario);
        RunOptions opts;
        opts.out_dir = fresh_dir(c.scenario + "_a");
        auto res = run_scenario(c, opts);
        CHECK(res.checks_ok);
        CHECK(res.failure_detail.empty());
        CHECK(res.report.contains("scenario"));
        CHECK(res.report["scenario"] == c.scenario);
        REQUIRE(!res.written.empty());
        for (const auto& path : res.written) CHECK(fs::exists(path));

        RunOptions again;
        again.out_dir = fresh_dir(c.scenario + "_b");
        auto res2 = run_scenario(c, again);
        REQUIRE(res2.written.size() == res.written.size());
        for (size_t i = 0; i < res.written.size(); ++i)
            CHECK(slurp(res.written[i]) == slurp(res2.written[i]));
    }
}

TEST_CASE("baseline update and comparison close the loop in process") {
    auto c = conservation_config();
    RunOptions opts;
    opts.out_dir = fresh_dir("baseline_loop");
    opts.update_baselines = true;
    opts.baseline_path = opts.out_dir / "base.json";
    auto res = run_scenario(c, opts);
    REQUIRE(fs::exists(*opts.baseline_path));

    auto cmp = compare_reports(res.report, read_json(*opts.baseline_path));
    CHECK(cmp.ok);
    CHECK(cmp.passed > 0);
}

TEST_CASE("engine override refuses an interacting model") {
    ScenarioConfig c;
    c.scenario = "mu_derivative";
    c.model.preset = "spinless_tv";
    c.model.b = 0.5;
    c.model.V = 0.4;
    c.L = {1};
    c.beta = {1.0};
    c.mu = {0.1};
    c.depths = {1};
    RunOptions opts;
    opts.out_dir = fresh_dir("override");
    opts.engine = Engine::free;
    CHECK_THROWS_AS((void)run_scenario(c, opts), EngineMismatchError);
}

TEST_SUITE_BEGIN("cli");

TEST_CASE("lab run produces a report and exits zero") {
    const char* bin = lab_bin();
    if (!bin) return;
    auto dir = fresh_dir("cli_run");
    save_config(conservation_config(), dir / "c.json");

    auto r = run_cmd(std::string(bin) + " run " + (dir / "c.json").string() + " --out " +
                         (dir / "out").string(),
                     dir);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "out" / "report.json"));
    CHECK(r.out.find("conservation") != std::string::npos);

    // a second run is byte identical
    auto r2 = run_cmd(std::string(bin) + " run " + (dir / "c.json").string() +
                          " --out " + (dir / "out2").string(),
                      dir);
    CHECK(r2.code == 0);
    CHECK(slurp(dir / "out" / "report.json") == slurp(dir / "out2" / "report.json"));
}

TEST_CASE("lab run rejects bad input with a named field") {
    const char* bin = lab_bin();
    if (!bin) return;
    auto dir = fresh_dir("cli_bad");

    {
        std::ofstream f(dir / "broken.json");
        f << "{ not json";
    }
    auto r = run_cmd(std::string(bin) + " run " + (dir / "broken.json").string(), dir);
    CHECK(r.code != 0);
    CHECK(!r.err.empty());

    Json j = to_json(conservation_config());
    j["scenario"] = "mystery";
    write_json(dir / "unknown.json", j);
    auto r2 = run_cmd(std::string(bin) + " run " + (dir / "unknown.json").string(), dir);
    CHECK(r2.code != 0);
    CHECK(r2.err.find("scenario") != std::string::npos);

    auto r3 = run_cmd(std::string(bin) + " run " + (dir / "absent.json").string(), dir);
    CHECK(r3.code != 0);

    auto r4 = run_cmd(std::string(bin), dir);
    CHECK(r4.code != 0);
    CHECK((r4.out + r4.err).find("usage") != std::string::npos);
}

TEST_CASE("lab run --engine free fails on an interacting model") {
    const char* bin = lab_bin();
    if (!bin) return;
    auto dir = fresh_dir("cli_engine");
    ScenarioConfig c;
    c.scenario = "mu_derivative";
    c.model.preset = "spinless_tv";
    c.model.b = 0.5;
    c.model.V = 0.4;
    c.L = {1};
    c.beta = {1.0};
    c.mu = {0.1};
    c.depths = {1};
    save_config(c, dir / "c.json");

    auto r = run_cmd(std::string(bin) + " run " + (dir / "c.json").string() +
                         " --engine free --out " + (dir / "out").string(),
                     dir);
    CHECK(r.code != 0);
    CHECK(!r.err.empty());

    auto r2 = run_cmd(std::string(bin) + " run " + (dir / "c.json").string() +
                          " --engine ed --out " + (dir / "out2").string(),
                      dir);
    CHECK(r2.code == 0);
}

TEST_CASE("lab compare distinguishes pass, drift, and hash mismatch") {
    const char* bin = lab_bin();
    if (!bin) return;
    auto dir = fresh_dir("cli_compare");
    save_config(conservation_config(), dir / "c.json");

    auto r = run_cmd(std::string(bin) + " run " + (dir / "c.json").string() +
                         " --out " + (dir / "out").string() + " --update-baselines",
                     dir);
    REQUIRE(r.code == 0);
    fs::path base = dir / "c.baseline.json";
    REQUIRE(fs::exists(base));
    fs::path report = dir / "out" / "report.json";

    auto ok = run_cmd(std::string(bin) + " compare " + report.string() + " " +
                          base.string(),
                      dir);
    CHECK(ok.code == 0);

    Json drift = read_json(base);
    bool bumped = false;
    for (auto& [key, entry] : drift["values"].items()) {
        entry["value"] = entry["value"].get<double>() + 1.0;
        entry["atol"] = 1e-12;
        bumped = true;
        break;
    }
    REQUIRE(bumped);
    write_json(dir / "drift.json", drift);
    auto bad = run_cmd(std::string(bin) + " compare " + report.string() + " " +
                           (dir / "drift.json").string(),
                       dir);
    CHECK(bad.code != 0);

    Json mism = read_json(base);
    mism["config_hash"] = "0";
    write_json(dir / "mism.json", mism);
    auto hash = run_cmd(std::string(bin) + " compare " + report.string() + " " +
                            (dir / "mism.json").string(),
                        dir);
    CHECK(hash.code != 0);
    CHECK((hash.out + hash.err).find("config_hash") != std::string::npos);
}

TEST_SUITE_END();
