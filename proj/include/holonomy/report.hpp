/**
 * @file report.hpp
 * @brief Verification records and their bit-stable serialisation.
 */
#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace holonomy {

inline constexpr const char* kToolVersion = "1.0.0";

class ReportIOError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct CheckRecord {
    std::string id;        // check identifier, e.g. "xmod.axiom2"
    std::string anchor;    // the identity the check exercises
    int criterion = 0;     // acceptance criterion (0: supporting check)
    std::string fixture;   // fixture name or "-"
    std::string subject;   // path / 2-path / sample set within the fixture
    std::string digest;    // FNV-1a of the inputs
    double residual = 0.0;
    double tolerance = 0.0;
    std::string relation = "le";   // pass iff residual <= tol ("le") or >= tol ("ge")
    bool pass = false;
    std::string note;
    double wall_ms = 0.0;
};

inline bool evaluate(const CheckRecord& r)
{
    if (std::isnan(r.residual)) return false;
    return r.relation == "ge" ? r.residual >= r.tolerance : r.residual <= r.tolerance;
}

struct Report {
    std::string suite;
    std::uint64_t seed = 0;
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::string> fixtures;
    std::vector<CheckRecord> records;
    bool timings = false;

    std::size_t failures() const
    {
        return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return !r.pass; }));
    }
    bool passed() const { return failures() == 0; }

    /// Order records by (id, fixture, subject).
    void normalize()
    {
        std::stable_sort(records.begin(), records.end(), [](const CheckRecord& a, const CheckRecord& b) {
            return std::tie(a.id, a.fixture, a.subject) < std::tie(b.id, b.fixture, b.subject);
        });
    }
};

namespace detail {

inline std::string format_double(double v)
{
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_json(const nlohmann::json& j, std::string& out, int indent, int level)
{
    const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * level), ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) { out += "{}"; return; }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {   // std::map: keys sorted
                if (!first) out += ",\n";
                first = false;
                out += pad + nlohmann::json(it.key()).dump() + ": ";
                write_json(it.value(), out, indent, level + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) { out += "[]"; return; }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                write_json(j[i], out, indent, level + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case nlohmann::json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

}  // namespace detail

/// Serialise any JSON value with sorted keys and 17 significant digits.
inline std::string stable_dump(const nlohmann::json& j)
{
    std::string out;
    detail::write_json(j, out, 2, 0);
    out += "\n";
    return out;
}

inline nlohmann::json to_json(const CheckRecord& r, bool timings)
{
    nlohmann::json j;
    j["id"] = r.id;
    j["anchor"] = r.anchor;
    j["criterion"] = r.criterion;
    j["fixture"] = r.fixture;
    j["subject"] = r.subject;
    j["digest"] = r.digest;
    j["residual"] = r.residual;
    j["tolerance"] = r.tolerance;
    j["relation"] = r.relation;
    j["pass"] = r.pass;
    if (!r.note.empty()) j["note"] = r.note;
    if (timings) j["wall_ms"] = r.wall_ms;
    return j;
}

inline nlohmann::json to_json(const Report& rep)
{
    nlohmann::json j;
    j["tool"] = "holonomy";
    j["version"] = kToolVersion;
    j["suite"] = rep.suite;
    j["seed"] = rep.seed;
    j["config"] = rep.config;
    j["fixtures"] = rep.fixtures;
    j["records"] = nlohmann::json::array();
    for (const auto& r : rep.records) j["records"].push_back(to_json(r, rep.timings));
    std::size_t fail = rep.failures();
    j["summary"] = {{"total", rep.records.size()}, {"passed", rep.records.size() - fail}, {"failed", fail}};
    return j;
}

inline std::string render_text(const Report& rep)
{
    std::ostringstream os;
    os << "holonomy " << kToolVersion << "  suite " << rep.suite << "  seed " << rep.seed << "\n";
    char line[512];
    std::snprintf(line, sizeof line, "%-6s %-34s %-7s %-22s %-24s %-24s %s\n", "status", "check", "fixture", "subject",
                  "residual", "tolerance", "crit");
    os << line;
    for (const auto& r : rep.records) {
        std::string res = detail::format_double(r.residual), tol = detail::format_double(r.tolerance);
        std::snprintf(line, sizeof line, "%-6s %-34s %-7s %-22s %-24s %s%-22s %d", r.pass ? "PASS" : "FAIL",
                      r.id.c_str(), r.fixture.c_str(), r.subject.c_str(), res.c_str(), r.relation == "ge" ? ">=" : "<=",
                      tol.c_str(), r.criterion);
        os << line;
        if (rep.timings) {
            std::snprintf(line, sizeof line, "  %.1f ms", r.wall_ms);
            os << line;
        }
        if (!r.note.empty()) os << "  (" << r.note << ")";
        os << "\n";
    }
    std::size_t fail = rep.failures();
    os << rep.records.size() << " checks, " << rep.records.size() - fail << " passed, " << fail << " failed\n";
    return os.str();
}

/// Write the report as "json" or "text"; an empty path means stdout.
inline void emit_report(const Report& rep, const std::string& format, const std::string& path)
{
    std::string body;
    if (format == "json")
        body = stable_dump(to_json(rep));
    else if (format == "text")
        body = render_text(rep);
    else
        throw std::invalid_argument("unknown report format '" + format + "'");
    if (path.empty() || path == "-") {
        std::fwrite(body.data(), 1, body.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ReportIOError("cannot write report to " + path);
    out << body;
    if (!out) throw ReportIOError("error while writing report to " + path);
}

}  // namespace holonomy
