#include "xs/equilibrium.hpp"

#include "xs/errors.hpp"
#include "xs/solve.hpp"

namespace xs {

using boost::multiprecision::abs;
using boost::multiprecision::acos;
using boost::multiprecision::cos;
using boost::multiprecision::sin;
using boost::multiprecision::sqrt;

namespace {

constexpr int kTrace = 200;

Real half() { return Real(1) / 2; }

Complex log_ratio(const Complex& s) { return log((s - Complex(half())) / (s + Complex(half()))); }

Real s_b_of(const Real& c1) { return sqrt(Real(1) / 4 + 1 / c1); }

Real contour_radius(const Real& c1) {
    if (!(c1 > 0)) return Real(1);
    return std::max(Real(1), Real(s_b_of(c1) * Real(3) / 4 + half()));
}

// V'(J), V'(J)/(s-1/2), V''(J), s V''(J), s V''(J)/(s-1/2), V''(J)/(s+1/2), V''(J)/(s-1/2)
std::vector<Real> contour_moments(const Potential& V, const Real& c1, const Real& c0, const Real& radius,
                                  const PrecisionContext& ctx) {
    auto g = [&](const Complex& s, std::vector<Complex>& out) {
        Complex J = map_J(c1, c0, s, ctx);
        Complex v1 = V.d1(J), v2 = V.d2(J);
        Complex sm = s - Complex(half()), sp = s + Complex(half());
        out[0] = v1;
        out[1] = v1 / sm;
        out[2] = v2;
        out[3] = v2 * s;
        out[4] = v2 * s / sm;
        out[5] = v2 / sp;
        out[6] = v2 / sm;
    };
    std::vector<Complex> r = integrate_circle(g, 7, radius, ctx);
    std::vector<Real> out;
    for (const auto& z : r) out.push_back(z.re);
    return out;
}

std::pair<Real, Real> solve_from(const Potential& V, const Real& t, Real c1, Real c0, const PrecisionContext& ctx) {
    auto moments = [&](const std::vector<Real>& x) {
        if (!(x[0] > 0)) throw NonConvergent("solve_coefficients: c1 left the positive axis");
        return contour_moments(V, x[0], x[1], contour_radius(x[0]), ctx);
    };
    auto f = [&](const std::vector<Real>& x) {
        std::vector<Real> m = moments(x);
        return std::vector<Real>{x[0] * m[0] - t, m[1] - t};
    };
    auto jac = [&](const std::vector<Real>& x) {
        std::vector<Real> m = moments(x);
        Matrix j(2, 2);
        j(0, 0) = m[0] + x[0] * m[3];
        j(0, 1) = x[0] * m[2];
        j(1, 0) = m[4];
        j(1, 1) = m[6];
        return j;
    };
    std::vector<Real> x = newton_solve(f, jac, {c1, c0}, ctx);
    return {x[0], x[1]};
}

std::pair<Real, Real> solve_continued(const Potential& V, const Real& t, const PrecisionContext& ctx, int depth) {
    try {
        return solve_from(V, t, t, t / 2, ctx);
    } catch (const NumericalError&) {
        if (depth >= 20) throw;
    }
    auto [c1, c0] = solve_continued(V, t / 2, ctx, depth + 1);
    // c1 ~ t and c0 ~ t/2 to first order, so rescale the half-t solution
    try {
        return solve_from(V, t, c1 * 2, c0 * 2, ctx);
    } catch (const NumericalError&) {
        throw NonConvergent("solve_coefficients: Newton failed at t = " + to_decimal(t, 8) +
                            " even after continuation from t/2");
    }
}

// Newton for J(s) = x with Im s > 0 kept throughout
Complex newton_on_gamma(const EquilibriumData& eq, const Real& x, Complex s, const PrecisionContext& ctx) {
    const Real tol = pow10(-(ctx.digits - 4));
    Complex f = map_J(eq.c1, eq.c0, s, ctx) - Complex(x);
    bool polished = false;
    for (int it = 0; it < ctx.newton_max_iter; ++it) {
        Complex step = f / map_J_prime(eq.c1, s);
        Real lambda = 1;
        Complex sn, fn;
        bool ok = false, stayed_up = false;
        for (int half_step = 0; half_step < 30; ++half_step) {
            sn = s - lambda * step;
            if (sn.im > 0) {
                try {
                    fn = map_J(eq.c1, eq.c0, sn, ctx) - Complex(x);
                    stayed_up = true;
                    if (abs(fn) < abs(f) || abs(lambda * step) <= tol * (1 + abs(s))) {
                        ok = true;
                        break;
                    }
                } catch (const OnBranchCut&) {
                }
            }
            lambda /= 2;
        }
        if (!ok) {
            // no step reduces |J(s) - x|: either we sit at the rounding floor (close to an endpoint,
            // where J' is tiny) or every trial crossed the real axis
            if (stayed_up && abs(f) <= pow10(-(ctx.digits / 2)) * (1 + abs(x))) return s;
            throw BranchEscape("inverse_map: iterate left the upper half plane at x = " + to_decimal(x, 10));
        }
        Real moved = abs(sn - s);
        s = sn;
        f = fn;
        if (moved <= tol * (1 + abs(s)) || abs(f) <= tol * (1 + abs(x))) {
            if (polished) return s;
            polished = true;
        }
    }
    throw NonConvergent("inverse_map: Newton did not converge at x = " + to_decimal(x, 10));
}

void build_trace(EquilibriumData& eq, const PrecisionContext& ctx) {
    const Real r = (eq.b - eq.a) / 2;
    const Real p = pi();
    eq.trace.assign(kTrace + 1, Complex());
    eq.trace[0] = Complex(eq.s_b);
    eq.trace[kTrace] = Complex(-eq.s_b);
    // square-root start off the right endpoint: J(s) ~ b + J''(s_b)(s - s_b)^2/2
    const Real sm = eq.s_b * eq.s_b - Real(1) / 4;
    const Real jpp = 2 * eq.s_b / (sm * sm);
    for (int k = 1; k < kTrace; ++k) {
        Real th = p * k / kTrace;
        Real x = eq.c0 + r * cos(th);
        Complex seed;
        if (k == 1)
            seed = Complex(eq.s_b, sqrt(2 * (eq.b - x) / jpp));
        else
            seed = Real(2) * eq.trace[k - 1] - eq.trace[k - 2];
        if (!(seed.im > 0)) seed.im = abs(eq.trace[k - 1].im);
        eq.trace[k] = newton_on_gamma(eq, x, seed, ctx);
    }
}

void fill_hpoly(EquilibriumData& eq, const PrecisionContext& ctx) {
    const int deg = eq.V.degree();
    auto g = [&](const Complex& s, std::vector<Complex>& out) {
        Complex v1 = eq.V.d1(map_J(eq.c1, eq.c0, s, ctx));
        Complex inv = Complex(1) / s;
        Complex w = v1 * inv;
        for (int k = 0; k < deg; ++k) {
            out[k] = w;
            w = w * inv;
        }
    };
    std::vector<Complex> h = integrate_circle(g, deg, Real(1), ctx);
    eq.hpoly.clear();
    for (const auto& z : h) eq.hpoly.push_back(z.re);
}

std::pair<Real, Real> alpha_beta(const Real& P, const Real& Q, const Real& s_b) {
    const Real k = 1 / (pi() * sqrt(s_b));
    Real beta = k * ((half() + s_b) * P + (half() - s_b) * Q);
    Real alpha = k * ((half() + s_b) * Q + (half() - s_b) * P);
    return {alpha, beta};
}

}  // namespace

Complex map_J(const Real& c1, const Real& c0, const Complex& s, const PrecisionContext& ctx) {
    const Real tol = pow10(-(ctx.digits - 8));
    if (abs(s.im) <= tol && abs(s.re) <= half() + tol)
        throw OnBranchCut("map_J: s = " + to_decimal(s.re, 10) + " is on the cut [-1/2, 1/2]");
    return Complex(c1 * s.re + c0, c1 * s.im) - log_ratio(s);
}

Complex map_J_prime(const Real& c1, const Complex& s) {
    return Complex(c1) - Complex(1) / (s * s - Complex(Real(1) / 4));
}

std::pair<Real, Real> coefficient_residuals(const Potential& V, const Real& t, const Real& c1, const Real& c0,
                                            const Real& radius, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    Potential Vd = V.digits() == ctx.digits ? V : V.at(ctx.digits);
    std::vector<Real> m = contour_moments(Vd, c1, c0, radius, ctx);
    return {c1 * m[0] - t, m[1] - t};
}

std::pair<Real, Real> solve_coefficients(const Potential& V, const Real& t, const PrecisionContext& ctx) {
    ctx.validate();
    if (!(t > 0)) throw ValidationError("equilibrium: t must be positive");
    ScopedPrecision guard(ctx.digits);
    Potential Vd = V.digits() == ctx.digits ? V : V.at(ctx.digits);
    return solve_continued(Vd, Real(t), ctx, 0);
}

std::pair<Real, Real> endpoints(const EquilibriumData& eq) { return {eq.a, eq.b}; }

std::pair<Real, Real> edge_constants(const EquilibriumData& eq, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    std::vector<Real> m = contour_moments(eq.V, eq.c1, eq.c0, contour_radius(eq.c1), ctx);
    return alpha_beta(m[6], m[5], eq.s_b);
}

std::pair<Real, Real> endpoint_derivatives(const EquilibriumData& eq) {
    ScopedPrecision guard(eq.digits);
    const Real k = pi() * sqrt(eq.s_b);
    return {(half() - eq.s_b) / (k * eq.alpha), (half() + eq.s_b) / (k * eq.beta)};
}

Complex inverse_map(const EquilibriumData& eq, const Real& x, Branch branch, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    if (!(x > eq.a && x < eq.b)) throw ValidationError("inverse_map: x must lie strictly inside (a, b)");
    const Real r = (eq.b - eq.a) / 2;
    Real c = (x - eq.c0) / r;
    if (c > 1) c = 1;
    if (c < -1) c = -1;
    Real pos = acos(c) / pi() * kTrace;
    // quadratic interpolation in theta: s(theta) is analytic up to the endpoints, so the seed
    // stays relatively accurate even right next to s_b or -s_b
    int k = static_cast<int>(pos);
    if (k < 1) k = 1;
    if (k > kTrace - 1) k = kTrace - 1;
    Real w = pos - k;
    Complex seed = (w * (w - 1) / 2) * eq.trace[k - 1] + ((1 - w) * (1 + w)) * eq.trace[k] +
                   (w * (w + 1) / 2) * eq.trace[k + 1];
    // acos loses half the digits next to +-1; use the square-root expansion there instead
    const Real sm = eq.s_b * eq.s_b - Real(1) / 4;
    const Real jpp = 2 * eq.s_b / (sm * sm);  // J''(s_b) = -J''(-s_b)
    const Real near = pow10(-8) * (eq.b - eq.a);
    if (eq.b - x < near) seed = Complex(eq.s_b, sqrt(2 * (eq.b - x) / jpp));
    if (x - eq.a < near) seed = Complex(-eq.s_b, sqrt(2 * (x - eq.a) / jpp));
    if (!(seed.im > 0)) seed.im = pow10(-(ctx.digits / 2));
    Complex s = newton_on_gamma(eq, x, seed, ctx);
    return branch == Branch::upper ? s : conj(s);
}

Real density_contour(const EquilibriumData& eq, const Real& x, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    Complex s = inverse_map(eq, x, Branch::upper, ctx);
    return horner(eq.hpoly, s).im / (pi() * eq.t);
}

Real density(const EquilibriumData& eq, const Real& x, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const Complex ip = inverse_map(eq, x, Branch::upper, ctx);
    const Complex im = conj(ip);
    // the log factor vanishes at both endpoints (I+ is real there); nodes within rounding
    // distance of an endpoint or of x cannot be inverted reliably. The integrand is O(sqrt) at
    // the ends and O(log) at x, so dropping those nodes costs nothing at this precision
    const Real guard_band = pow10(-(ctx.digits - 8)) * (eq.b - eq.a);
    auto f = [&](const Real& u) -> Real {
        if (abs(u - x) < guard_band || u - eq.a < guard_band || eq.b - u < guard_band) return Real(0);
        Complex iu = inverse_map(eq, u, Branch::upper, ctx);
        Real num = abs(iu - im), den = abs(iu - ip);
        return eq.V.d2(u) * log(num / den);
    };
    // each node costs an inversion good to about d - 8 digits, so ask for a few less than that
    PrecisionContext loose = ctx;
    loose.quad_rel_tol = std::max(ctx.quad_rel_tol, Real(pow10(-(ctx.digits - 12))));
    Real lo = integrate_tanh_sinh(f, RealInterval(eq.a, x), loose);
    Real hi = integrate_tanh_sinh(f, RealInterval(x, eq.b), loose);
    const Real p = pi();
    // field V/t: the printed formula is the t = 1 case
    return (lo + hi) / (2 * p * p * eq.t);
}

Real DensityTable::psi(const Real& x) const {
    if (!(x > a && x < b)) return Real(0);
    return h(x) * sqrt((x - a) * (b - x));
}

DensityTable build_density_table(const EquilibriumData& eq, const PrecisionContext& ctx, int nodes) {
    ScopedPrecision guard(ctx.digits);
    DensityTable tab;
    tab.a = eq.a;
    tab.b = eq.b;
    const Real floor = -10 * ctx.quad_rel_tol;
    const Real tail_tol = pow10(-(ctx.digits - 6));
    // double the node count until the Chebyshev tail is at the noise level
    for (;; nodes *= 2) {
        tab.nodes = Chebyshev::nodes(eq.a, eq.b, nodes);
        std::vector<Real> hv(nodes);
        tab.values.resize(nodes);
        for (int k = 0; k < nodes; ++k) {
            const Real& x = tab.nodes[k];
            tab.values[k] = density_contour(eq, x, ctx);
            if (tab.values[k] < floor)
                throw NonConvergent("density: negative value " + to_decimal(tab.values[k], 6) + " at x = " +
                                    to_decimal(x, 10));
            hv[k] = tab.values[k] / sqrt((x - eq.a) * (eq.b - x));
        }
        tab.h = Chebyshev(eq.a, eq.b, hv);
        const auto& c = tab.h.coefficients();
        Real big = 0, tail = 0;
        for (int k = 0; k < nodes; ++k) big = std::max(big, Real(abs(c[k])));
        for (int k = nodes - 4; k < nodes; ++k) tail = std::max(tail, Real(abs(c[k])));
        if (tail <= tail_tol * big * 100) break;
        if (nodes >= 8192) throw NonConvergent("density: Chebyshev table did not resolve psi with 8192 nodes");
    }
    tab.h.trim(tail_tol);
    tab.rule_x.resize(DensityTable::kRuleMax);
    tab.rule_w.resize(DensityTable::kRuleMax);
    const Real mid = (eq.a + eq.b) / 2, r = (eq.b - eq.a) / 2, p = pi();
    for (int j = 1; j < DensityTable::kRuleMax; ++j) {
        Real th = p * j / DensityTable::kRuleMax;
        Real sn = sin(th);
        tab.rule_x[j] = mid + r * cos(th);
        tab.rule_w[j] = r * r * sn * sn * tab.h(tab.rule_x[j]);
    }
    tab.mass_check = measure_integral(tab, [](const Real&) { return Real(1); }, ctx);
    if (abs(tab.mass_check - 1) > pow10(-(ctx.digits / 2)))
        throw NonConvergent("density: total mass " + to_decimal(tab.mass_check, 20) + " differs from 1");
    return tab;
}

Real edge_fit(const EquilibriumData& eq, bool right, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    Real f[3];
    for (int i = 0; i < 3; ++i) {
        Real eps = pow10(-(3 + i));
        Real x = right ? Real(eq.b - eps) : Real(eq.a + eps);
        f[i] = density_contour(eq, x, ctx) / sqrt(eps);
    }
    // f(eps) = c + c' eps + c'' eps^2 + ...; eps shrinks by 10 each step
    Real r1 = (10 * f[1] - f[0]) / 9, r2 = (10 * f[2] - f[1]) / 9;
    return (100 * r2 - r1) / 99;
}

namespace detail {

// shared by the solver and the cache loader: everything that follows from (c1, c0)
void complete_equilibrium(EquilibriumData& eq, const PrecisionContext& ctx) {
    eq.s_b = s_b_of(eq.c1);
    eq.s_a = -eq.s_b;
    eq.a = map_J(eq.c1, eq.c0, Complex(eq.s_a), ctx).re;
    eq.b = map_J(eq.c1, eq.c0, Complex(eq.s_b), ctx).re;
    std::vector<Real> m = contour_moments(eq.V, eq.c1, eq.c0, contour_radius(eq.c1), ctx);
    eq.P = m[6];
    eq.Q = m[5];
    auto [al, be] = alpha_beta(eq.P, eq.Q, eq.s_b);
    eq.alpha = al;
    eq.beta = be;
    if (!(eq.alpha > 0 && eq.beta > 0)) throw NonConvergent("equilibrium: edge constants are not positive");
    eq.x_min = eq.V.tilted_argmin(Real(0));
    eq.x_hat_min = eq.V.tilted_argmin(eq.t);
    fill_hpoly(eq, ctx);
    build_trace(eq, ctx);
}

}  // namespace detail

Equilibrium solve_equilibrium(const Potential& V, const Real& t, const PrecisionContext& ctx, int table_nodes) {
    ScopedPrecision guard(ctx.digits);
    Equilibrium out;
    EquilibriumData& eq = out.data;
    eq.digits = ctx.digits;
    eq.V = V.digits() == ctx.digits ? V : V.at(ctx.digits);
    eq.t = Real(t);
    auto [c1, c0] = solve_coefficients(eq.V, eq.t, ctx);
    eq.c1 = c1;
    eq.c0 = c0;
    detail::complete_equilibrium(eq, ctx);
    out.table = build_density_table(eq, ctx, table_nodes);
    eq.ell = lagrange_constant(eq, out.table, ctx);
    return out;
}

}  // namespace xs
