#include "xs/config.hpp"

#include "xs/errors.hpp"
#include "xs/report.hpp"

#include <fstream>
#include <set>

namespace xs {

namespace {

std::string as_decimal(const nlohmann::json& v, const std::string& field) {
    // numbers are accepted for convenience but strings are what round-trips
    if (v.is_string()) {
        try {
            (void)parse_rational(v.get<std::string>());
        } catch (const std::exception&) {
            throw ValidationError("config: " + field + " has a non-decimal entry '" + v.get<std::string>() + "'");
        }
        return v.get<std::string>();
    }
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw ValidationError("config: " + field + " entries must be decimal strings");
}

std::vector<std::string> decimals(const nlohmann::json& v, const std::string& field) {
    if (!v.is_array()) throw ValidationError("config: " + field + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(as_decimal(e, field));
    return out;
}

}  // namespace

Potential RunConfig::make_potential(int d) const { return Potential::from_decimal(potential, d); }

void RunConfig::validate() const {
    if (n_list.empty()) throw ValidationError("config: n_list must not be empty");
    for (int n : n_list)
        if (n < 1) throw ValidationError("config: n_list entries must be positive");
    if (t_list.empty()) throw ValidationError("config: t_list must not be empty");
    for (const auto& t : t_list)
        if (parse_rational(t) <= 0) throw ValidationError("config: t_list entries must be positive (got " + t + ")");
    if (digits < 32) throw ValidationError("config: digits must be >= 32 (got " + std::to_string(digits) + ")");
    if (extra_degrees < 0 || extra_degrees > 8) throw ValidationError("config: extra_degrees must be in 0..8");
    if (M < 1) throw ValidationError("config: M must be positive");
    for (const auto& [s, name] : {std::pair{delta, "delta"}, std::pair{delta_prime, "delta_prime"}}) {
        Rational q = parse_rational(s);
        if (q <= 0 || q >= 1) throw ValidationError(std::string("config: ") + name + " must lie in (0, 1)");
    }
    if (x_star != "midpoint") (void)parse_rational(x_star);
    // convexity and the rest of the potential checks
    ScopedPrecision g(digits);
    (void)make_potential(digits);
}

std::vector<std::pair<std::string, std::string>> RunConfig::effective_grid() const {
    if (!grid.empty()) return grid;
    std::vector<std::string> axis;
    if (regime == Regime::bulk)
        axis = {"-0.5", "0", "0.5"};
    else if (regime == Regime::raw)
        axis = {"-0.5", "0.5"};
    else
        axis = {"0", "0.5", "1"};
    std::vector<std::pair<std::string, std::string>> g;
    for (const auto& a : axis)
        for (const auto& b : axis) g.emplace_back(a, b);
    return g;
}

nlohmann::json RunConfig::canonical() const {
    nlohmann::json j;
    j["potential"] = potential;
    j["n_list"] = n_list;
    j["t_list"] = t_list;
    j["regime"] = regime_name(regime);
    j["scaling"] = scaling == BulkScaling::density ? "density" : "literal";
    j["x_star"] = x_star;
    nlohmann::json g = nlohmann::json::array();
    for (const auto& [a, b] : effective_grid()) g.push_back({a, b});
    j["grid"] = g;
    j["digits"] = digits;
    j["extra_degrees"] = extra_degrees;
    j["check_reflection"] = check_reflection;
    j["delta"] = delta;
    j["delta_prime"] = delta_prime;
    j["M"] = M;
    return j;
}

std::string RunConfig::hash() const { return fnv1a_hex(canonical().dump()); }

RunConfig config_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known{"potential", "n_list", "t_list", "regime", "scaling",
                                             "x_star", "grid", "digits", "extra_degrees", "check_reflection",
                                             "delta", "delta_prime", "M", "output_dir", "cache_dir"};
    if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ValidationError("config: unknown field '" + k + "'");
    RunConfig c;
    try {
        if (j.contains("potential")) c.potential = decimals(j["potential"], "potential");
        if (j.contains("n_list")) c.n_list = j["n_list"].get<std::vector<int>>();
        if (j.contains("t_list")) c.t_list = decimals(j["t_list"], "t_list");
        if (j.contains("regime")) c.regime = parse_regime(j["regime"].get<std::string>());
        if (j.contains("scaling")) {
            std::string s = j["scaling"].get<std::string>();
            if (s == "density")
                c.scaling = BulkScaling::density;
            else if (s == "literal")
                c.scaling = BulkScaling::literal;
            else
                throw ValidationError("config: scaling must be density or literal");
        }
        if (j.contains("x_star")) c.x_star = as_decimal(j["x_star"], "x_star");
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            if (g.is_object()) {
                auto xs = decimals(g.at("xi"), "grid.xi"), es = decimals(g.at("eta"), "grid.eta");
                for (const auto& a : xs)
                    for (const auto& b : es) c.grid.emplace_back(a, b);
            } else if (g.is_array()) {
                for (const auto& p : g) {
                    if (!p.is_array() || p.size() != 2) throw ValidationError("config: grid points are [xi, eta] pairs");
                    c.grid.emplace_back(as_decimal(p[0], "grid"), as_decimal(p[1], "grid"));
                }
            } else {
                throw ValidationError("config: grid is {\"xi\": [...], \"eta\": [...]} or a list of pairs");
            }
        }
        if (j.contains("digits")) c.digits = j["digits"].get<int>();
        if (j.contains("extra_degrees")) c.extra_degrees = j["extra_degrees"].get<int>();
        if (j.contains("check_reflection")) c.check_reflection = j["check_reflection"].get<bool>();
        if (j.contains("delta")) c.delta = as_decimal(j["delta"], "delta");
        if (j.contains("delta_prime")) c.delta_prime = as_decimal(j["delta_prime"], "delta_prime");
        if (j.contains("M")) c.M = j["M"].get<int>();
        if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
        throw ValidationError(std::string("config: ") + ex.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ValidationError("config " + path + " is not valid JSON: " + ex.what());
    }
    return config_from_json(j);
}

}  // namespace xs
