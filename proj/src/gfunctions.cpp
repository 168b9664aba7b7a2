#include "xs/equilibrium.hpp"

#include "xs/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace xs {

using boost::multiprecision::abs;
using boost::multiprecision::log;
using boost::multiprecision::sqrt;

namespace detail {
void complete_equilibrium(EquilibriumData& eq, const PrecisionContext& ctx);
}

namespace {

std::vector<Real> measure_vec(const DensityTable& tab, const VecFn& f, size_t dim, const PrecisionContext& ctx) {
    const int M = DensityTable::kRuleMax;
    std::vector<std::vector<Real>> cache(M);
    std::vector<Real> prev, cur(dim);
    const Real p = pi();
    for (int m = 16; m <= M; m *= 2) {
        const int stride = M / m;
        std::fill(cur.begin(), cur.end(), Real(0));
        for (int j = 1; j < m; ++j) {
            const int g = j * stride;
            if (cache[g].empty()) {
                cache[g].resize(dim);
                f(tab.rule_x[g], cache[g]);
            }
            for (size_t k = 0; k < dim; ++k) cur[k] += cache[g][k] * tab.rule_w[g];
        }
        for (auto& v : cur) v *= p / m;
        if (!prev.empty()) {
            bool same = true;
            for (size_t k = 0; k < dim; ++k)
                if (abs(cur[k] - prev[k]) > ctx.quad_rel_tol * (1 + abs(cur[k]))) same = false;
            if (same) return cur;
        }
        prev = cur;
    }
    throw NonConvergent("measure integral: no agreement with " + std::to_string(M) + " nodes");
}

void check_off_cut(const Complex& z, const Real& b, const char* who) {
    if (z.im == 0 && z.re <= b) throw ValidationError(std::string(who) + ": z must lie off (-inf, b]");
}

}  // namespace

Real measure_integral(const DensityTable& tab, const RealFn& f, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    return measure_vec(tab, [&](const Real& x, std::vector<Real>& out) { out[0] = f(x); }, 1, ctx)[0];
}

Real log_potential(const DensityTable& tab, const Real& y, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    auto f = [&](const Real& x) -> Real {
        if (x == y) return Real(0);
        return log(abs(x - y)) * tab.psi(x);
    };
    if (y > tab.a && y < tab.b)
        return integrate_tanh_sinh(f, RealInterval(tab.a, y), ctx) + integrate_tanh_sinh(f, RealInterval(y, tab.b), ctx);
    return integrate_tanh_sinh(f, RealInterval(tab.a, tab.b), ctx);
}

std::pair<Complex, Complex> g_functions(const EquilibriumData& eq, const DensityTable& tab, const Complex& z,
                                        const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    check_off_cut(z, eq.b, "g_functions");
    const Complex ez = exp(z);
    RealInterval iv(tab.a, tab.b);
    Complex g = integrate_tanh_sinh_complex([&](const Real& s) { return log(z - Complex(s)) * tab.psi(s); }, iv, ctx);
    Complex gt = integrate_tanh_sinh_complex(
        [&](const Real& s) { return log(ez - Complex(Real(exp(s)))) * tab.psi(s); }, iv, ctx);
    return {g, gt};
}

Complex F_function(const EquilibriumData& eq, const DensityTable& tab, const Complex& z, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    if (!(abs(z.im) < pi())) throw ValidationError("F_function: |Im z| must be below pi");
    auto f = [&](const Real& s, std::vector<Real>& out) {
        Complex v = Complex(s) + log(exprel(z - Complex(s)));
        out[0] = v.re;
        out[1] = v.im;
    };
    std::vector<Real> r = measure_vec(tab, f, 2, ctx);
    return Complex(r[0] * eq.t / 2, r[1] * eq.t / 2);
}

Real F_real(const EquilibriumData& eq, const DensityTable& tab, const Real& x, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    Real r = measure_integral(tab, [&](const Real& s) { return Real(s + log(exprel(Real(x - s)))); }, ctx);
    return r * eq.t / 2;
}

Real variational_value(const EquilibriumData& eq, const DensityTable& tab, const Real& y,
                       const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    // log|e^x - e^y| = y + log|x - y| + log E(x - y)
    Real smooth = measure_integral(tab, [&](const Real& x) { return Real(log(exprel(Real(x - y)))); }, ctx);
    return 2 * log_potential(tab, y, ctx) + y + smooth - eq.V.value(y) / eq.t;
}

Real lagrange_constant(const EquilibriumData& eq, const DensityTable& tab, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const Real w = eq.b - eq.a;
    Real mid = variational_value(eq, tab, (eq.a + eq.b) / 2, ctx);
    Real lo = variational_value(eq, tab, eq.a + w / 4, ctx);
    Real hi = variational_value(eq, tab, eq.a + 3 * w / 4, ctx);
    Real spread = std::max({mid, lo, hi}) - std::min({mid, lo, hi});
    if (spread > pow10(-(ctx.digits / 4)))
        throw VariationalViolation("equilibrium: Euler-Lagrange equality fails on the support (spread " +
                                   to_decimal(spread, 6) + ")");
    return mid;
}

Real effective_potential(const EquilibriumData& eq, const DensityTable& tab, const Real& y,
                         const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    return variational_value(eq, tab, y, ctx) - eq.ell;
}

// --- cache -------------------------------------------------------------------

std::string equilibrium_cache_key(const Potential& V, const std::string& t, int digits) {
    return "V=" + V.key() + ";t=" + t + ";digits=" + std::to_string(digits);
}

void save_equilibrium(const std::string& path, const Equilibrium& e, const std::string& t_text) {
    const EquilibriumData& eq = e.data;
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = "equilibrium";
    j["key"] = equilibrium_cache_key(eq.V, t_text, eq.digits);
    j["digits"] = eq.digits;
    j["t"] = t_text;
    std::vector<std::string> v;
    for (const auto& q : eq.V.exact()) v.push_back(rational_to_string(q));
    j["V"] = v;
    j["c0"] = to_decimal(eq.c0);
    j["c1"] = to_decimal(eq.c1);
    j["a"] = to_decimal(eq.a);
    j["b"] = to_decimal(eq.b);
    j["alpha"] = to_decimal(eq.alpha);
    j["beta"] = to_decimal(eq.beta);
    j["ell"] = to_decimal(eq.ell);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write equilibrium cache " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

std::optional<Equilibrium> load_equilibrium(const std::string& path, const Potential& V, const std::string& t_text,
                                            const PrecisionContext& ctx) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw IoError("corrupt equilibrium cache " + path + ": " + ex.what());
    }
    if (j.value("version", 0) != 1 || j.value("key", std::string()) != equilibrium_cache_key(V, t_text, ctx.digits))
        return std::nullopt;
    ScopedPrecision guard(ctx.digits);
    Equilibrium out;
    EquilibriumData& eq = out.data;
    try {
        eq.digits = ctx.digits;
        eq.V = V.digits() == ctx.digits ? V : V.at(ctx.digits);
        eq.t = from_decimal(t_text, ctx.digits);
        eq.c0 = from_decimal(j.at("c0").get<std::string>(), ctx.digits);
        eq.c1 = from_decimal(j.at("c1").get<std::string>(), ctx.digits);
        eq.ell = from_decimal(j.at("ell").get<std::string>(), ctx.digits);
    } catch (const nlohmann::json::exception& ex) {
        throw IoError("equilibrium cache " + path + " is missing fields: " + ex.what());
    }
    detail::complete_equilibrium(eq, ctx);
    out.table = build_density_table(eq, ctx);
    return out;
}

}  // namespace xs
