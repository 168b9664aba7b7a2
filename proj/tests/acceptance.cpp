// Runs the twelve acceptance checks at their stated tolerances, one line each.
// Exit status is the number of failed checks.

#include "xs/airy.hpp"
#include "xs/biortho.hpp"
#include "xs/diagnostics.hpp"
#include "xs/equilibrium.hpp"
#include "xs/errors.hpp"
#include "xs/kernel.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace xs;
using boost::multiprecision::abs;
using boost::multiprecision::exp;
using boost::multiprecision::pow;
using boost::multiprecision::sqrt;

namespace {

Potential quadratic(int d) { return Potential::from_decimal({"0", "0", "0.5"}, d); }
Potential quartic(int d) { return Potential::from_decimal({"0", "0", "0.5", "0", "0.05"}, d); }

const Equilibrium& eq1() {
    static Equilibrium e = [] {
        ScopedPrecision g(64);
        return solve_equilibrium(quadratic(64), Real(1), PrecisionContext::with_digits(64));
    }();
    return e;
}

// enough degrees for every check that uses size n: h_n (m >= n) and the decomposition (n + 5)
int degrees_for(int n) { return std::max(n, cd_degrees_needed(n, Real("0.15"), 6)); }

const BiorthoSystem& sys(int n) {
    static std::map<int, BiorthoSystem> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        const int d = default_biortho_digits(n);
        ScopedPrecision g(d);
        const int m = n == 32 ? 32 : degrees_for(n);
        it = cache.emplace(n, construct(quadratic(d), n, m, PrecisionContext::with_digits(d))).first;
    }
    return it->second;
}

PrecisionContext ctx_of(const BiorthoSystem& s) { return PrecisionContext::with_digits(s.digits); }

std::string fmt(const Real& x) { return to_decimal(x, 4); }

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome c1_closed_form() {
    ScopedPrecision g(64);
    auto c = PrecisionContext::with_digits(64);
    Real worst = 0;
    for (const char* t : {"0.5", "1", "2"}) {
        Real T(t);
        auto [c1, c0] = solve_coefficients(quadratic(64), T, c);
        worst = std::max({worst, Real(abs(c1 - T)), Real(abs(c0 - T / 2))});
    }
    return {worst < Real("1e-20"), "max |(c1, c0) - (t, t/2)| = " + fmt(worst)};
}

Outcome c2_equilibrium() {
    const Equilibrium& e = eq1();
    const EquilibriumData& d = e.data;
    ScopedPrecision g(64);
    auto c = PrecisionContext::with_digits(64);
    const Real mass = abs(e.table.mass_check - 1);
    std::vector<Real> v;
    for (const char* f : {"0.2", "0.5", "0.8"}) v.push_back(variational_value(d, e.table, Real(d.a + Real(f) * (d.b - d.a)), c));
    const Real spread = std::max({abs(v[0] - v[1]), abs(v[1] - v[2]), abs(v[0] - v[2])});
    const Real ob = effective_potential(d, e.table, Real(d.b + Real("0.5")), c);
    const Real oa = effective_potential(d, e.table, Real(d.a - Real("0.5")), c);
    bool ok = mass < Real("1e-20") && spread < Real("1e-15") && ob < 0 && oa < 0;
    return {ok, "mass err " + fmt(mass) + ", spread " + fmt(spread) + ", outside " + fmt(ob) + " / " + fmt(oa)};
}

Outcome c3_derivatives() {
    ScopedPrecision g(64);
    auto c = PrecisionContext::with_digits(64);
    const Real h("1e-4");
    Real worst = 0;
    for (const Potential& V : {quadratic(64), quartic(64)}) {
        Equilibrium e = solve_equilibrium(V, Real(1), c);
        auto [ap, bp] = endpoint_derivatives(e.data);
        auto ends = [&](const Real& t) {
            auto [c1, c0] = solve_coefficients(V, t, c);
            const Real sb = sqrt(Real(1) / 4 + 1 / c1);
            return std::pair<Real, Real>{map_J(c1, c0, Complex(-sb), c).re, map_J(c1, c0, Complex(sb), c).re};
        };
        auto [ap_lo, bp_lo] = ends(Real(1 - h));
        auto [ap_hi, bp_hi] = ends(Real(1 + h));
        const Real fa = (ap_hi - ap_lo) / (2 * h), fb = (bp_hi - bp_lo) / (2 * h);
        worst = std::max({worst, Real(abs(ap / fa - 1)), Real(abs(bp / fb - 1))});
    }
    return {worst < Real("1e-5"), "max relative gap " + fmt(worst)};
}

Outcome c4_biorthogonality() {
    const BiorthoSystem& s = sys(24);
    auto c = ctx_of(s);
    ScopedPrecision g(s.digits);
    const Real defect = orthogonality_defect(s, c);
    const bool positive = std::all_of(s.h.begin(), s.h.end(), [](const Real& h) { return h > 0; });
    auto z = all_zeros(s, c);
    bool inter = true;
    for (size_t j = 1; j < z.size(); ++j)
        inter = inter && interlaces(z[j - 1].zeros_p, z[j].zeros_p) && interlaces(z[j - 1].zeros_qx, z[j].zeros_qx);
    return {defect < Real("1e-20") && positive && inter,
            "defect " + fmt(defect) + " at " + std::to_string(s.digits) + " digits, degrees 0.." + std::to_string(s.m) +
                ", h > 0: " + (positive ? "yes" : "no") + ", interlacing: " + (inter ? "yes" : "no")};
}

Outcome c5_norming() {
    const EquilibriumData& e = eq1().data;
    std::vector<Real> r;
    std::string detail;
    for (int n : {16, 24, 32}) {
        const BiorthoSystem& s = sys(n);
        ScopedPrecision g(s.digits);
        const Real pred = 2 * pi() * sqrt(Real(e.c1)) * exp(Real(n * e.ell));
        r.push_back(abs(s.h[n] / pred - 1));
        detail += "n=" + std::to_string(n) + ": " + fmt(r.back()) + " ";
    }
    return {r[0] > r[1] && r[1] > r[2] && r[2] < Real("0.1"), detail};
}

Outcome c6_kernel_structure() {
    const int n = 8, d = default_biortho_digits(n);
    ScopedPrecision g(d);
    auto c = PrecisionContext::with_digits(d);
    BiorthoSystem s = construct(quadratic(d), n, n - 1, c);
    const Real tr = abs(kernel_trace(s, c) - n);
    const Real mid = (eq1().data.a + eq1().data.b) / 2;
    const Real pr = projection_residual(s, mid, Real(mid + Real("0.4")), c);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.5, 2.5);
    Real gauge = 0;
    for (int i = 0; i < 5; ++i) {
        const Real x(U(rng)), y(U(rng));
        const Real raw = kernel_raw(s, x, x) * kernel_raw(s, y, y) - kernel_raw(s, x, y) * kernel_raw(s, y, x);
        const Real cj = kernel_conjugated(s, eq1(), x, x, c) * kernel_conjugated(s, eq1(), y, y, c) -
                        kernel_conjugated(s, eq1(), x, y, c) * kernel_conjugated(s, eq1(), y, x, c);
        gauge = std::max(gauge, Real(abs(raw - cj)));
    }
    const Real tol("1e-10");
    return {tr < tol && pr < tol && gauge < tol,
            "trace err " + fmt(tr) + ", projection " + fmt(pr) + ", determinants " + fmt(gauge)};
}

Outcome c7_sine() {
    const Real xstar = (eq1().data.a + eq1().data.b) / 2;
    std::vector<Real> err;
    std::string detail;
    for (int n : {12, 18, 24, 32}) {
        const BiorthoSystem& s = sys(n);
        ScopedPrecision g(s.digits);
        Real worst = 0;
        for (const char* a : {"-0.5", "0", "0.5"})
            for (const char* b : {"-0.5", "0", "0.5"}) {
                ScaledValue v = bulk_scaled(s, eq1(), xstar, Real(a), Real(b), ctx_of(s));
                worst = std::max(worst, Real(abs(v.value - v.reference)));
            }
        err.push_back(worst);
        detail += "n=" + std::to_string(n) + ": " + fmt(worst) + " ";
    }
    bool mono = true;
    for (size_t i = 1; i < err.size(); ++i) mono = mono && err[i] <= err[i - 1];
    return {mono && err.back() < Real("0.05"), detail};
}

Outcome c8_airy() {
    std::vector<Real> err;
    std::string detail;
    for (int n : {12, 18, 24, 32}) {
        const BiorthoSystem& s = sys(n);
        ScopedPrecision g(s.digits);
        Real worst = 0;
        for (const char* a : {"0", "0.5", "1"})
            for (const char* b : {"0", "0.5", "1"}) {
                ScaledValue v = edge_scaled(s, eq1(), Edge::right, Real(a), Real(b), ctx_of(s));
                worst = std::max(worst, Real(abs(v.value - v.reference) / std::max(v.reference, Real("0.05"))));
            }
        err.push_back(worst);
        detail += "n=" + std::to_string(n) + ": " + fmt(worst) + " ";
    }
    bool mono = true;
    for (size_t i = 1; i < err.size(); ++i) mono = mono && err[i] <= err[i - 1];
    // left edge against the reflected system
    const int n = 32;
    const BiorthoSystem& s = sys(n);
    ScopedPrecision g(s.digits);
    auto c = ctx_of(s);
    BiorthoSystem w = construct(reflect_potential(quadratic(s.digits), n), n, n - 1, c);
    Real refl = 0;
    for (const char* a : {"0", "0.5", "1"})
        for (const char* b : {"0", "0.5", "1"}) {
            ScaledValue L = edge_scaled(s, eq1(), Edge::left, Real(a), Real(b), c);
            ScaledValue R = edge_scaled_reflected(w, eq1(), Real(a), Real(b), c);
            refl = std::max(refl, Real(abs(L.value - R.value)));
        }
    detail += "(scaled error must be < 0.1; trend " + std::string(mono ? "decreasing" : "not monotone") +
              "), reflection gap " + fmt(refl);
    return {mono && err.back() < Real("0.1") && refl < Real("1e-6"), detail};
}

Outcome c9_airy_identity() {
    ScopedPrecision g(64);
    auto c = PrecisionContext::with_digits(64);
    Real worst = 0;
    for (auto [x, y] : {std::pair{"0", "1"}, std::pair{"-1", "0.5"}, std::pair{"1", "1.000001"}}) {
        const Real X(x), Y(y);
        const AiryValue ax = airy(X, c), ay = airy(Y, c);
        const Real closed = (ax.ai * ay.aip - ax.aip * ay.ai) / (X - Y);
        const Real integral = airy_tail_integral(X, Y, Real(12), c);
        worst = std::max(worst, Real(abs(integral / closed - 1)));
    }
    return {worst < Real("1e-8"), "max relative gap " + fmt(worst)};
}

Outcome c10_identity() {
    const BiorthoSystem& s = sys(16);
    auto c = ctx_of(s);
    ScopedPrecision g(s.digits);
    CDDiagnostics d = cd_coefficients(s, Real("0.15"), 6, {}, eq1().data, c);
    Real va = 0, vb = 0;
    for (int j = 0; j <= s.m; ++j)
        for (int k = 0; k <= s.m; ++k) {
            if (k > j + 1) va = std::max(va, Real(abs(d.a(j, k))));
            if (k > j + d.k_delta) vb = std::max(vb, Real(abs(d.b(j, k))));
        }
    const Real xstar = (eq1().data.a + eq1().data.b) / 2;
    const Complex u = bulk_point(eq1(), xstar, Complex(Real("0.25")), 16, c);
    const Complex v = bulk_point(eq1(), xstar, Complex(Real("-0.25")), 16, c);
    CDDecomposition r = cd_decomposition(s, d, eq1(), u, v, c);
    const Real res = abs(r.residual), tol = pow10(-(s.digits / 4));
    return {res < tol && va < Real("1e-15") && vb < Real("1e-15"),
            "residual " + fmt(res) + " (tol " + fmt(tol) + "), above-band a " + fmt(va) + ", b " + fmt(vb)};
}

Outcome c11_coefficients() {
    std::vector<Real> dev;
    std::string detail;
    for (int n : {12, 18, 24}) {
        const BiorthoSystem& s = sys(n);
        ScopedPrecision g(s.digits);
        CDDiagnostics d = cd_coefficients(s, Real("0.15"), 6, {}, eq1().data, ctx_of(s));
        dev.push_back(abs(d.a(n - 1, n) - d.alpha_limits.at(-1)));
        detail += "n=" + std::to_string(n) + ": " + fmt(dev.back()) + " ";
    }
    ScopedPrecision g(64);
    const Real E = exp(Real(1));
    return {dev[0] > dev[1] && dev[1] > dev[2] && dev[2] < Real("0.15") * E, detail};
}

Outcome c12_zeros() {
    const BiorthoSystem& s = sys(32);
    auto c = ctx_of(s);
    ScopedPrecision g(s.digits);
    const Real xmin = s.V.tilted_argmin(Real(0));
    Real worst = 0;
    for (int j = 1; j <= 4; ++j) {
        ZeroSet z = zeros(s, j, c);
        for (const auto* v : {&z.zeros_p, &z.zeros_qx})
            for (const auto& x : *v) worst = std::max(worst, Real(abs(x - xmin)));
    }
    return {worst < Real("0.5"), "max |zero - x_min| " + fmt(worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
        {"1 quadratic closed form", c1_closed_form},
        {"2 equilibrium validity", c2_equilibrium},
        {"3 endpoint derivatives", c3_derivatives},
        {"4 biorthogonality n=24", c4_biorthogonality},
        {"5 norming constants", c5_norming},
        {"6 kernel structure n=8", c6_kernel_structure},
        {"7 sine limit", c7_sine},
        {"8 Airy limit", c8_airy},
        {"9 Airy integral identity", c9_airy_identity},
        {"10 exact identity n=16", c10_identity},
        {"11 a_{n-1,n} trend", c11_coefficients},
        {"12 zero confinement n=32", c12_zeros},
    };
    int failed = 0;
    for (const auto& [name, f] : checks) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::ostringstream line;
        line.precision(3);
        line << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << " [" << std::fixed << sec
             << " s]";
        std::cout << line.str() << std::endl;
    }
    std::cout << (checks.size() - failed) << "/" << checks.size() << " criteria passed" << std::endl;
    return failed;
}
