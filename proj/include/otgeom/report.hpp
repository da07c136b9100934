#pragma once

// Check reporting: a flat list of named numeric checks with pass/fail
// verdicts, serialized deterministically (fixed entry order, fixed float
// formatting, no timestamps) so that repeated runs under the same seed are
// byte-identical.

#include "otgeom/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace otgeom::report {

struct CheckEntry {
    std::string name;      // stable path-like identifier, e.g. "signature/log-n2-a0.50"
    std::string identity;  // which identity or quantity the check exercises
    double computed = 0;   // measured value (usually a max discrepancy)
    double reference = 0;  // expected value where one exists, else 0
    double tolerance = 0;  // pass threshold actually applied (post scaling)
    bool pass = false;
    std::string detail;
};

struct Report {
    std::uint64_t seed = 0;
    double tol_scale = 1.0;
    std::string config_digest;
    std::vector<CheckEntry> entries;

    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }

    int failures() const {
        int n = 0;
        for (const auto& e : entries) n += e.pass ? 0 : 1;
        return n;
    }
};

// 17 significant digits: round-trip exact and stable across runs.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline nlohmann::ordered_json to_json(const Report& r) {
    nlohmann::ordered_json j;
    j["seed"] = r.seed;
    j["tol_scale"] = format_double(r.tol_scale);
    j["config_digest"] = r.config_digest;
    j["total"] = r.entries.size();
    j["failures"] = r.failures();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : r.entries) {
        nlohmann::ordered_json je;
        je["name"] = e.name;
        je["identity"] = e.identity;
        je["computed"] = format_double(e.computed);
        je["reference"] = format_double(e.reference);
        je["tolerance"] = format_double(e.tolerance);
        je["pass"] = e.pass;
        if (!e.detail.empty()) je["detail"] = e.detail;
        arr.push_back(std::move(je));
    }
    j["checks"] = std::move(arr);
    return j;
}

inline void write_report(const Report& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot open report file: " + path);
    out << to_json(r).dump(2) << "\n";
}

// Minimal CSV writer with the same formatting guarantees.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot open csv file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
}

// FNV-1a digest used to stamp the effective configuration into the report.
inline std::string fnv1a_digest(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace otgeom::report
