#pragma once

#include "xs/real.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace xs {

std::string fnv1a_hex(const std::string& s);

// significant digits used for reals in CSV output
inline constexpr int kCsvDigits = 20;
std::string csv_num(const Real& x);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// What one unit of work (one n, or one t) hands back. Tables with the same name are appended in
// task order; summary entries are collected into an array.
struct TaskOutput {
    std::map<std::string, Table> tables;
    nlohmann::json summary;

    nlohmann::json to_json() const;
    static TaskOutput from_json(const nlohmann::json& j);
};

// RFC 4180 quoting only where needed
std::string csv_line(const std::vector<std::string>& cells);
void write_csv(const std::string& path, const Table& t);
void write_json(const std::string& path, const nlohmann::json& j);

// max and median of a list
nlohmann::json error_stats(std::vector<Real> v);

}  // namespace xs
