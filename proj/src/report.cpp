#include "maglat/report.hpp"

#include "maglat/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maglat {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

// own emitter: doubles always go through format_double, so serialized output
// is stable byte for byte across library versions
void emit(const Json& j, std::ostream& os, int indent, int depth) {
    const std::string pad(static_cast<size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            size_t i = 0;
            for (const auto& [key, value] : j.items()) {
                os << pad_in << Json(key).dump() << ": ";
                emit(value, os, indent, depth + 1);
                if (++i < j.size()) os << ",";
                os << "\n";
            }
            os << pad << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (size_t i = 0; i < j.size(); ++i) {
                os << pad_in;
                emit(j[i], os, indent, depth + 1);
                if (i + 1 < j.size()) os << ",";
                os << "\n";
            }
            os << pad << "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v))
                throw std::invalid_argument("dump_json: non-finite number");
            os << format_double(v);
            return;
        }
        default:
            os << j.dump();
            return;
    }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::ostringstream os;
    emit(j, os, indent, 0);
    return os.str();
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_json: cannot open " + path.string());
    out << dump_json(j) << "\n";
    if (!out) throw std::runtime_error("write_json: short write to " + path.string());
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_json: cannot open " + path.string());
    return Json::parse(in);
}

void write_current_field_csv(const std::filesystem::path& path,
                             const CurrentField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("write_current_field_csv: cannot open " + path.string());
    out << "k,z1,z2,j,shell\n";
    for (const auto& [e, value] : field.j)
        out << e.k << "," << e.z.x1 << "," << e.z.x2 << "," << format_double(value) << ","
            << shell_distance(e, field.L) << "\n";
}

CompareResult compare_reports(const Json& report, const Json& baseline) {
    CompareResult res;
    if (baseline.contains("config_hash")) {
        const std::string want = baseline["config_hash"].is_string()
                                     ? baseline["config_hash"].get<std::string>()
                                     : baseline["config_hash"].dump();
        std::string got = "<missing>";
        if (report.contains("config_hash"))
            got = report["config_hash"].is_string()
                      ? report["config_hash"].get<std::string>()
                      : report["config_hash"].dump();
        if (got != want) {
            res.error = "config_hash mismatch: report has " + got + ", baseline has " + want;
            res.ok = false;
            return res;
        }
    }
    if (!baseline.contains("values") || !baseline["values"].is_object()) {
        res.error = "baseline has no values table";
        return res;
    }
    for (const auto& [key, entry] : baseline["values"].items()) {
        const Json::json_pointer ptr(key);
        if (!report.contains(ptr)) {
            res.error = "report is missing value at " + key;
            res.ok = false;
            return res;
        }
        const Json& node = report.at(ptr);
        if (!node.is_number()) {
            res.error = "report value at " + key + " is not a number";
            res.ok = false;
            return res;
        }
        BaselineCheck ch;
        ch.key = key;
        ch.got = node.get<double>();
        ch.want = entry.at("value").get<double>();
        ch.atol = entry.value("atol", 0.0);
        ch.rtol = entry.value("rtol", 0.0);
        ch.pass = std::abs(ch.got - ch.want) <= ch.atol + ch.rtol * std::abs(ch.want);
        if (ch.pass) ++res.passed;
        res.checks.push_back(ch);
    }
    res.ok = true;
    for (const auto& ch : res.checks) res.ok = res.ok && ch.pass;
    return res;
}

namespace {

std::string escape_pointer_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

void collect_numeric_leaves(const Json& node, const std::string& ptr, Json& values,
                            double atol, double rtol) {
    if (node.is_number()) {
        Json entry;
        entry["value"] = node.get<double>();
        entry["atol"] = atol;
        entry["rtol"] = rtol;
        values[ptr] = entry;
        return;
    }
    if (node.is_object()) {
        for (const auto& [key, child] : node.items())
            collect_numeric_leaves(child, ptr + "/" + escape_pointer_token(key), values,
                                   atol, rtol);
        return;
    }
    if (node.is_array()) {
        for (size_t i = 0; i < node.size(); ++i)
            collect_numeric_leaves(node[i], ptr + "/" + std::to_string(i), values, atol,
                                   rtol);
    }
}

}  // namespace

Json make_baseline(const Json& report, const std::string& scenario,
                   std::uint64_t config_hash, const std::vector<std::string>& pointers,
                   double atol, double rtol) {
    Json base;
    base["scenario"] = scenario;
    base["config_hash"] = std::to_string(config_hash);
    base["values"] = Json::object();
    for (const auto& p : pointers) {
        const Json::json_pointer ptr(p);
        if (!report.contains(ptr))
            throw ValidationError("make_baseline: report has no node at " + p);
        collect_numeric_leaves(report.at(ptr), p, base["values"], atol, rtol);
    }
    return base;
}

}  // namespace maglat
