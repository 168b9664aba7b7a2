#include "xs/report.hpp"

#include "xs/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace xs {

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string csv_num(const Real& x) { return to_decimal(x, kCsvDigits); }

nlohmann::json TaskOutput::to_json() const {
    nlohmann::json j;
    for (const auto& [name, t] : tables) j["tables"][name] = {{"header", t.header}, {"rows", t.rows}};
    j["summary"] = summary;
    return j;
}

TaskOutput TaskOutput::from_json(const nlohmann::json& j) {
    TaskOutput out;
    if (j.contains("tables"))
        for (const auto& [name, t] : j["tables"].items()) {
            out.tables[name].header = t["header"].get<std::vector<std::string>>();
            out.tables[name].rows = t["rows"].get<std::vector<std::vector<std::string>>>();
        }
    out.summary = j.value("summary", nlohmann::json());
    return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string s;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        const std::string& c = cells[i];
        if (c.find_first_of(",\"\n") == std::string::npos) {
            s += c;
        } else {
            s += '"';
            for (char ch : c) {
                if (ch == '"') s += '"';
                s += ch;
            }
            s += '"';
        }
    }
    return s;
}

void write_csv(const std::string& path, const Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << csv_line(t.header) << "\n";
    for (const auto& r : t.rows) out << csv_line(r) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

nlohmann::json error_stats(std::vector<Real> v) {
    if (v.empty()) return {{"max", nullptr}, {"median", nullptr}};
    std::sort(v.begin(), v.end());
    const size_t k = v.size();
    Real med = k % 2 ? v[k / 2] : Real((v[k / 2 - 1] + v[k / 2]) / 2);
    return {{"max", csv_num(v.back())}, {"median", csv_num(med)}};
}

}  // namespace xs
