#pragma once

// Report serialization. JSON numbers are written with 17 significant digits
// so every double round-trips bit exactly; CSV uses the same rule. Baseline
// comparison walks the baseline's value table and checks the report under
// per-value absolute/relative tolerances.

#include "maglat/currents.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace maglat {

using Json = nlohmann::ordered_json;

std::string dump_json(const Json& j, int indent = 2);
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

std::string format_double(double v);  // %.17g

// columns: k,z1,z2,j,shell; rows ordered k then z lexicographic
void write_current_field_csv(const std::filesystem::path& path,
                             const CurrentField& field);

struct BaselineCheck {
    std::string key;  // JSON pointer into the report
    double got = 0.0;
    double want = 0.0;
    double atol = 0.0;
    double rtol = 0.0;
    bool pass = false;
};

struct CompareResult {
    std::vector<BaselineCheck> checks;
    int passed = 0;
    bool ok = false;
    std::string error;  // nonempty on structural mismatch
};

// baseline: { "scenario": ..., "config_hash": ...,
//             "values": { "<json pointer>": {"value": v, "atol": a, "rtol": r} } }
CompareResult compare_reports(const Json& report, const Json& baseline);

// builds a baseline from a report: every numeric leaf under the given
// pointers, with the supplied default tolerances
Json make_baseline(const Json& report, const std::string& scenario,
                   std::uint64_t config_hash, const std::vector<std::string>& pointers,
                   double atol, double rtol);

}  // namespace maglat
