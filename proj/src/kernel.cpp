#include "xs/kernel.hpp"

#include "xs/airy.hpp"
#include "xs/errors.hpp"
#include "xs/poly.hpp"

#include <algorithm>
#include <chrono>

namespace xs {

using boost::multiprecision::abs;
using boost::multiprecision::exp;
using boost::multiprecision::pow;
using boost::multiprecision::sin;

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::bulk: return "bulk";
        case Regime::edge_right: return "edge_right";
        case Regime::edge_left: return "edge_left";
        case Regime::raw: return "raw";
    }
    return "?";
}

Regime parse_regime(const std::string& s) {
    if (s == "bulk") return Regime::bulk;
    if (s == "edge_right") return Regime::edge_right;
    if (s == "edge_left") return Regime::edge_left;
    if (s == "raw") return Regime::raw;
    throw ValidationError("regime must be one of bulk, edge_right, edge_left, raw (got '" + s + "')");
}

namespace {

void need_degrees(const BiorthoSystem& sys) {
    if (sys.m < sys.n - 1)
        throw ValidationError("kernel: system has degrees 0.." + std::to_string(sys.m) + ", need 0.." +
                              std::to_string(sys.n - 1));
}

PrecisionContext eq_ctx(const Equilibrium& eq) { return PrecisionContext::with_digits(eq.data.digits); }

Real F_at(const Equilibrium& eq, const Real& x) {
    return F_real(eq.data, eq.table, x, eq_ctx(eq));
}

}  // namespace

Real kernel_raw(const BiorthoSystem& sys, const Real& x, const Real& y) {
    need_degrees(sys);
    ScopedPrecision guard(sys.digits);
    const Real ey = exp(y);
    Real s = 0;
    for (int j = 0; j < sys.n; ++j) s += horner(sys.p[j], x) * horner(sys.q[j], ey) / sys.h[j];
    return s * exp(-Real(sys.n) * (sys.V.value(x) + sys.V.value(y)) / 2);
}

Complex kernel_raw(const BiorthoSystem& sys, const Complex& x, const Complex& y) {
    need_degrees(sys);
    ScopedPrecision guard(sys.digits);
    const Complex ey = exp(y);
    Complex s;
    for (int j = 0; j < sys.n; ++j) s += horner(sys.p[j], x) * horner(sys.q[j], ey) / Complex(sys.h[j]);
    const Complex Vx = horner(sys.V.coeffs(), x), Vy = horner(sys.V.coeffs(), y);
    return s * exp(Real(-Real(sys.n) / 2) * (Vx + Vy));
}

Real kernel_conjugated(const BiorthoSystem& sys, const Equilibrium& eq1, const Real& x, const Real& y,
                       const PrecisionContext& ctx) {
    const Real fx = F_at(eq1, x), fy = F_at(eq1, y);
    ScopedPrecision guard(ctx.digits);
    return exp(Real(sys.n) * (fx - fy)) * kernel_raw(sys, x, y);
}

Real sine_kernel(const Real& xi, const Real& eta) {
    if (xi == eta) return Real(1);
    const Real d = xi - eta;
    return sin(pi() * d) / (pi() * d);
}

Real airy_tail_integral(const Real& xi, const Real& eta, const Real& L, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    return integrate_gauss_legendre(
        [&](const Real& y) { return Real(airy(Real(xi + y), ctx).ai * airy(Real(eta + y), ctx).ai); },
        RealInterval(Real(0), L), ctx);
}

ScaledValue bulk_scaled(const BiorthoSystem& sys, const Equilibrium& eq1, const Real& x_star, const Real& xi,
                        const Real& eta, const PrecisionContext& ctx, BulkScaling scaling) {
    if (!(x_star > eq1.data.a && x_star < eq1.data.b))
        throw OutsideBulk("bulk_scaled: x* = " + to_decimal(x_star, 10) + " is not inside (" +
                          to_decimal(eq1.data.a, 10) + ", " + to_decimal(eq1.data.b, 10) + ")");
    Real dF;
    {
        ScopedPrecision g(eq1.data.digits);
        const Real h = pow10(-(eq1.data.digits / 4));
        dF = (F_at(eq1, Real(x_star + h)) - F_at(eq1, Real(x_star - h))) / (2 * h);
    }
    ScopedPrecision guard(ctx.digits);
    Real s = eq1.table.psi(x_star);
    if (scaling == BulkScaling::literal) s *= pi();
    const Real unit = s * sys.n;
    const Real u = x_star + xi / unit, v = x_star + eta / unit;
    Real value = exp(dF * (xi - eta) / s) / unit * kernel_raw(sys, u, v);
    return {value, sine_kernel(xi, eta)};
}

ScaledValue edge_scaled(const BiorthoSystem& sys, const Equilibrium& eq1, Edge side, const Real& xi,
                        const Real& eta, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const EquilibriumData& e = eq1.data;
    const Real c = pow(pi() * (side == Edge::right ? e.beta : e.alpha) * sys.n, Real(2) / 3);
    Real u, v;
    if (side == Edge::right) {
        u = e.b + xi / c;
        v = e.b + eta / c;
    } else {
        u = e.a - xi / c;
        v = e.a - eta / c;
    }
    const Real fu = F_at(eq1, u), fv = F_at(eq1, v);
    Real value = exp(Real(sys.n) * (fu - fv)) * kernel_raw(sys, u, v) / c;
    return {value, airy_kernel(xi, eta, ctx)};
}

ScaledValue edge_scaled_reflected(const BiorthoSystem& reflected, const Equilibrium& eq1_of_V, const Real& xi,
                                  const Real& eta, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const EquilibriumData& e = eq1_of_V.data;
    const int n = reflected.n;
    const Real c = pow(pi() * e.alpha * n, Real(2) / 3);
    const Real u = -e.a + xi / c, v = -e.a + eta / c;
    auto G = [&](const Real& x) { return Real(F_at(eq1_of_V, Real(-x)) + Real(n - 1) * x / (2 * n)); };
    const Real gu = G(u), gv = G(v);
    Real value = exp(Real(n) * (gu - gv)) * kernel_raw(reflected, u, v) / c;
    return {value, airy_kernel(xi, eta, ctx)};
}

void KernelRequest::validate(const EquilibriumData& eq1) const {
    if (n < 1) throw ValidationError("kernel request: n must be positive");
    if (grid.empty()) throw ValidationError("kernel request: grid is empty");
    if (regime == Regime::bulk) {
        if (!x_star) throw ValidationError("kernel request: bulk regime needs x_star");
        if (!(*x_star > eq1.a && *x_star < eq1.b))
            throw OutsideBulk("kernel request: x_star must lie inside (a, b) = (" + to_decimal(eq1.a, 10) + ", " +
                              to_decimal(eq1.b, 10) + ")");
    }
}

Real KernelResult::max_abs_err() const {
    Real m = 0;
    for (const auto& e : abs_err) m = std::max(m, e);
    return m;
}

KernelResult evaluate_kernel(const BiorthoSystem& sys, const Equilibrium& eq1, const KernelRequest& req,
                             const PrecisionContext& ctx) {
    req.validate(eq1.data);
    if (req.n != sys.n)
        throw ValidationError("kernel request: n = " + std::to_string(req.n) + " but the system has n = " +
                              std::to_string(sys.n));
    auto t0 = std::chrono::steady_clock::now();
    ScopedPrecision guard(ctx.digits);
    KernelResult out;
    const Real zero_floor = pow10(-(ctx.digits / 2));
    for (const auto& [xi, eta] : req.grid) {
        ScaledValue sv;
        switch (req.regime) {
            case Regime::bulk: sv = bulk_scaled(sys, eq1, *req.x_star, xi, eta, ctx, req.scaling); break;
            case Regime::edge_right: sv = edge_scaled(sys, eq1, Edge::right, xi, eta, ctx); break;
            case Regime::edge_left: sv = edge_scaled(sys, eq1, Edge::left, xi, eta, ctx); break;
            case Regime::raw: {
                Real k = kernel_raw(sys, xi, eta);
                sv = {req.conjugate ? kernel_conjugated(sys, eq1, xi, eta, ctx) : k, k};
                break;
            }
        }
        Real err = abs(sv.value - sv.reference);
        Real ra = abs(sv.reference);
        out.values.push_back(sv.value);
        out.reference.push_back(sv.reference);
        out.abs_err.push_back(err);
        // a reference that vanishes (sin(pi k)) is reported against 1
        out.rel_err.push_back(ra > zero_floor ? Real(err / ra) : err);
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

Real kernel_trace(const BiorthoSystem& sys, const PrecisionContext& ctx) {
    need_degrees(sys);
    ScopedPrecision guard(ctx.digits);
    PrecisionContext loose = ctx;
    loose.quad_rel_tol = std::max(ctx.quad_rel_tol, Real(pow10(-(ctx.digits / 2))));
    return integrate_gauss_legendre([&](const Real& x) { return kernel_raw(sys, x, x); }, sys.window, loose);
}

Real projection_residual(const BiorthoSystem& sys, const Real& x, const Real& y, const PrecisionContext& ctx) {
    need_degrees(sys);
    ScopedPrecision guard(ctx.digits);
    PrecisionContext loose = ctx;
    loose.quad_rel_tol = std::max(ctx.quad_rel_tol, Real(pow10(-(ctx.digits / 2))));
    Real r = integrate_gauss_legendre(
        [&](const Real& s) { return Real(kernel_raw(sys, x, s) * kernel_raw(sys, s, y)); }, sys.window, loose);
    return abs(r - kernel_raw(sys, x, y));
}

}  // namespace xs
