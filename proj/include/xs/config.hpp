#pragma once

#include "xs/kernel.hpp"
#include "xs/potential.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xs {

// Everything a run depends on. Reals stay as the decimal strings they were written with, so the
// hash does not depend on binary rounding.
struct RunConfig {
    std::vector<std::string> potential{"0", "0", "0.5"};
    std::vector<int> n_list{12};
    std::vector<std::string> t_list{"1"};
    Regime regime = Regime::bulk;
    BulkScaling scaling = BulkScaling::density;
    std::string x_star = "midpoint";  // or a decimal
    // (xi, eta) pairs; empty means the regime default
    std::vector<std::pair<std::string, std::string>> grid;
    int digits = 64;        // equilibrium and reporting precision
    int extra_degrees = 0;  // biortho: m = n - 1 + extra_degrees
    bool check_reflection = false;
    // diagnostics
    std::string delta = "0.15", delta_prime = "0.2";
    int M = 6;

    std::string output_dir = "out";
    std::string cache_dir;  // empty: no caching

    Potential make_potential(int digits) const;
    // throws ValidationError
    void validate() const;
    // grid after defaults
    std::vector<std::pair<std::string, std::string>> effective_grid() const;
    // inputs that change results; output_dir, cache_dir and --jobs are left out
    nlohmann::json canonical() const;
    std::string hash() const;
};

// IoError if unreadable, ValidationError for bad fields
RunConfig load_config(const std::string& path);
RunConfig config_from_json(const nlohmann::json& j);

}  // namespace xs
