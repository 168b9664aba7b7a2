#include "doctest.h"

#include "xs/equilibrium.hpp"
#include "xs/errors.hpp"

#include <cstdio>
#include <filesystem>

using namespace xs;
using boost::multiprecision::abs;

namespace {

const PrecisionContext& ctx64() {
    static const PrecisionContext c = PrecisionContext::with_digits(64);
    return c;
}

Potential quadratic() { return Potential::from_decimal({"0", "0", "0.5"}, 64); }
Potential quartic() { return Potential::from_decimal({"0", "0", "0.5", "0", "0.05"}, 64); }

const Equilibrium& quad1() {
    static const Equilibrium e = [] {
        ScopedPrecision g(64);
        return solve_equilibrium(quadratic(), Real(1), ctx64());
    }();
    return e;
}

const Equilibrium& quart1() {
    static const Equilibrium e = [] {
        ScopedPrecision g(64);
        return solve_equilibrium(quartic(), Real(1), ctx64());
    }();
    return e;
}

Real rel(const Real& a, const Real& b) { return abs(a - b) / abs(b); }

}  // namespace

TEST_CASE("potential validation and reflection") {
    ScopedPrecision g(64);
    CHECK_THROWS_AS(Potential::from_decimal({"0", "1"}, 64), ValidationError);
    CHECK_THROWS_AS(Potential::from_decimal({"0", "0", "0", "1"}, 64), ValidationError);
    CHECK_THROWS_AS(Potential::from_decimal({"0", "0", "-0.5"}, 64), ValidationError);
    try {
        Potential::from_decimal({"0", "0", "-1", "0", "0.1"}, 64);
        FAIL("double well accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("strongly convex") != std::string::npos);
    }
    Potential v = Potential::from_decimal({"0.1", "-0.3", "0.5", "0.2", "0.05"}, 64);
    CHECK(v.convexity_floor() > 0);
    Potential r = reflect_potential(v, 7);
    CHECK(reflect_potential(r, 7).exact() == v.exact());
    CHECK(r.convexity_floor() == v.convexity_floor());
    // V(-x) + (6/7) x at a sample point
    Real x("0.37");
    CHECK(abs(r.value(x) - v.value(-x) - x * 6 / 7) < pow10(-60));
    CHECK(parse_rational("-1.25e-3") == Rational(-1, 800));
}

TEST_CASE("map_J values and symmetries") {
    const auto& c = ctx64();
    ScopedPrecision g(64);
    Real s5 = sqrt(Real(5)) / 2;
    Complex j = map_J(Real(1), Real("0.5"), Complex(s5), c);
    Real want = s5 + Real("0.5") - log((sqrt(Real(5)) - 1) / (sqrt(Real(5)) + 1));
    CHECK(abs(j.re - want) < pow10(-60));
    CHECK(abs(j.im) < pow10(-60));
    CHECK(abs(want - Real("2.58045763887")) < pow10(-11));
    Complex far = map_J(Real(2), Real(-1), Complex(Real("1e20"), Real("3e19")), c);
    Complex lin = Complex(Real("2e20") - 1, Real("6e19"));
    CHECK(abs(far - lin) < pow10(-18));
    Complex s0(Real("0.3"), Real("0.8"));
    Complex a = map_J(Real(1), Real(0), conj(s0), c), b = map_J(Real(1), Real(0), s0, c);
    CHECK(abs(a - conj(b)) < pow10(-60));
    CHECK_THROWS_AS(map_J(Real(1), Real(0), Complex(Real("0.2")), c), OnBranchCut);
}

TEST_CASE("quadratic potential: c1 = t, c0 = t/2") {
    const auto& c = ctx64();
    ScopedPrecision g(64);
    for (const char* ts : {"0.25", "0.5", "1", "2"}) {
        Real t(ts);
        auto [c1, c0] = solve_coefficients(quadratic(), t, c);
        CHECK(abs(c1 - t) < pow10(-40));
        CHECK(abs(c0 - t / 2) < pow10(-40));
    }
    CHECK_THROWS_AS(solve_coefficients(quadratic(), Real(0), c), ValidationError);
    CHECK_THROWS_AS(solve_coefficients(quadratic(), Real(-1), c), ValidationError);
}

TEST_CASE("quartic potential: contour conditions re-verified independently") {
    const auto& d = quart1().data;
    // different circle and doubled precision
    PrecisionContext c2 = PrecisionContext::with_digits(128);
    ScopedPrecision g(128);
    auto [r1, r2] = coefficient_residuals(quartic(), Real(1), d.c1, d.c0, Real("1.7"), c2);
    CHECK(abs(r1) < pow10(-32));
    CHECK(abs(r2) < pow10(-32));
}

TEST_CASE("endpoints") {
    const auto& d = quad1().data;
    ScopedPrecision g(64);
    Real s5 = sqrt(Real(5)) / 2;
    Real lg = log((s5 - Real("0.5")) / (s5 + Real("0.5")));
    CHECK(abs(d.b - (s5 + Real("0.5") - lg)) < pow10(-55));
    CHECK(abs(d.a - (-s5 + Real("0.5") + lg)) < pow10(-55));
    for (const auto* e : {&quad1().data, &quart1().data}) {
        CHECK(abs(e->c0 - (e->a + e->b) / 2) < pow10(-55));
        Real lgs = log((e->s_b - Real("0.5")) / (e->s_b + Real("0.5")));
        CHECK(abs(e->b - e->a - 2 * (e->c1 * e->s_b - lgs)) < pow10(-55));
        CHECK(abs(e->s_b - sqrt(Real(1) / 4 + 1 / e->c1)) < pow10(-60));
        CHECK(e->x_min < e->b);
        CHECK(e->a < e->x_hat_min);
    }
}

TEST_CASE("inverse map") {
    const auto& c = ctx64();
    for (const auto* e : {&quad1().data, &quart1().data}) {
        ScopedPrecision g(64);
        for (int k = 1; k < 10; ++k) {
            Real x = e->a + (e->b - e->a) * k / 10;
            Complex s = inverse_map(*e, x, Branch::upper, c);
            CHECK(s.im > 0);
            Complex j = map_J(e->c1, e->c0, s, c);
            CHECK(abs(j.re - x) < pow10(-52));
            CHECK(abs(j.im) < pow10(-52));
            Complex sl = inverse_map(*e, x, Branch::lower, c);
            CHECK(abs(sl - conj(s)) < pow10(-60));
        }
        Complex near = inverse_map(*e, e->b - pow10(-30), Branch::upper, c);
        CHECK(abs(near.re - e->s_b) < pow10(-14));
        CHECK(near.im < pow10(-14));
        CHECK_THROWS_AS(inverse_map(*e, e->b + 1, Branch::upper, c), ValidationError);
    }
}

TEST_CASE("density: mass, positivity, literal and contour routes") {
    const auto& c = ctx64();
    for (const auto* e : {&quad1(), &quart1()}) {
        ScopedPrecision g(64);
        CHECK(abs(e->table.mass_check - 1) < pow10(-32));
        for (const auto& v : e->table.values) CHECK(v >= -10 * c.quad_rel_tol);
        auto nodes = Chebyshev::nodes(e->data.a, e->data.b, 10);
        for (const auto& x : nodes) CHECK(density(e->data, x, c) > 0);
        Real x = e->data.a + (e->data.b - e->data.a) * 3 / 10;
        CHECK(abs(density(e->data, x, c) - density_contour(e->data, x, c)) < pow10(-50));
        CHECK(abs(e->table.psi(x) - density_contour(e->data, x, c)) < pow10(-50));
    }
    // self-consistency at doubled precision
    PrecisionContext c2 = PrecisionContext::with_digits(128);
    ScopedPrecision g(128);
    Equilibrium hi = solve_equilibrium(quadratic(), Real(1), c2, 64);
    Real x("0.5");
    Real lo64 = density(quad1().data, x, c);
    Real lo128 = density(hi.data, x, c2);
    CHECK(rel(lo64, lo128) < pow10(-40));
    // closed form for the quadratic case: c1 Im I+(x) / pi
    CHECK(abs(lo64 - inverse_map(quad1().data, x, Branch::upper, c).im / pi()) < pow10(-50));
}

TEST_CASE("edge constants") {
    const auto& c = ctx64();
    for (const auto* e : {&quad1().data, &quart1().data}) {
        ScopedPrecision g(64);
        CHECK(e->alpha > 0);
        CHECK(e->beta > 0);
        auto [al, be] = edge_constants(*e, c);
        CHECK(abs(al - e->alpha) < pow10(-55));
        CHECK(abs(be - e->beta) < pow10(-55));
        CHECK(rel(edge_fit(*e, true, c), e->beta) < Real("1e-2"));
        CHECK(rel(edge_fit(*e, false, c), e->alpha) < Real("1e-2"));
        // determinant identity; the right-hand constant is pi^2
        Real p = pi();
        Real lhs = e->P * e->Q - (e->P - e->Q) * (e->P - e->Q) / e->c1;
        CHECK(abs(lhs - p * p * e->s_b * e->alpha * e->beta) < pow10(-16));
    }
    ScopedPrecision g(64);
    CHECK(abs(quad1().data.beta - Real("0.30103890392107595219")) < pow10(-19));
}

TEST_CASE("endpoint derivatives against finite differences") {
    PrecisionContext c = PrecisionContext::with_digits(64);
    ScopedPrecision g(64);
    const Real h("1e-4");
    for (const Potential& v : {quadratic(), quartic()}) {
        Equilibrium e = solve_equilibrium(v, Real(1), c, 64);
        auto [ap, bp] = endpoint_derivatives(e.data);
        CHECK(ap < 0);
        CHECK(bp > 0);
        auto ends = [&](const Real& t) {
            auto [c1, c0] = solve_coefficients(v, t, c);
            Real sb = sqrt(Real(1) / 4 + 1 / c1);
            return std::pair<Real, Real>{map_J(c1, c0, Complex(-sb), c).re, map_J(c1, c0, Complex(sb), c).re};
        };
        auto [a1, b1] = ends(1 + h);
        auto [a0, b0] = ends(1 - h);
        CHECK(rel((b1 - b0) / (2 * h), bp) < Real("1e-5"));
        CHECK(rel((a1 - a0) / (2 * h), ap) < Real("1e-5"));
    }
}

TEST_CASE("g functions") {
    const auto& c = ctx64();
    const auto& e = quart1();
    ScopedPrecision g(64);
    Real m1 = measure_integral(e.table, [](const Real& s) { return s; }, c);
    Complex z(Real("1e6"));
    auto [gz, gt] = g_functions(e.data, e.table, z, c);
    CHECK(abs(gz.re - log(z.re)) < Real("1e-5"));
    // z (g(z) - log z) -> -\int s d mu
    CHECK(abs(z.re * (gz.re - log(z.re)) + m1) < Real("1e-5"));
    // g~ at far left: e^z is negligible, log(-e^s) = s + i pi
    Complex zl(Real(-60), Real("0.5"));
    auto [gl, gtl] = g_functions(e.data, e.table, zl, c);
    CHECK(abs(gtl.re - m1) < Real("1e-20"));
    CHECK(abs(gtl.im - pi()) < Real("1e-20"));
    Complex w(Real("0.4"), Real("0.7"));
    auto [g1, t1] = g_functions(e.data, e.table, w, c);
    auto [g2, t2] = g_functions(e.data, e.table, conj(w), c);
    CHECK(abs(g1 - conj(g2)) < pow10(-40));
    CHECK(abs(t1 - conj(t2)) < pow10(-40));
    CHECK_THROWS_AS(g_functions(e.data, e.table, Complex(Real(0)), c), ValidationError);
}

TEST_CASE("F function") {
    const auto& c = ctx64();
    const auto& e = quart1();
    ScopedPrecision g(64);
    const auto& d = e.data;
    // real on the axis; continuous across [a, b]
    for (int k = 0; k <= 4; ++k) {
        Real x = d.a - 1 + (d.b - d.a + 2) * k / 4;
        Complex f = F_function(d, e.table, Complex(x), c);
        CHECK(abs(f.im) < pow10(-55));
        CHECK(abs(f.re - F_real(d, e.table, x, c)) < pow10(-55));
        Complex up = F_function(d, e.table, Complex(x, pow10(-30)), c);
        CHECK(abs(up - f) < pow10(-25));
    }
    // away from the support F = (t/2)(g~ - g)
    Complex z(Real("0.3"), Real("1.1"));
    auto [gz, gt] = g_functions(d, e.table, z, c);
    Complex diff = (gt - gz) * (d.t / 2) - F_function(d, e.table, z, c);
    // the two agree up to a multiple of i pi t
    CHECK(abs(diff.re) < pow10(-40));
    Real turns = diff.im / (pi() * d.t);
    CHECK(abs(turns - boost::multiprecision::round(turns)) < pow10(-40));
    // at t = 1, F(x) = (1/2) \int log|(e^x - e^y)/(x - y)| d mu(y), by tanh-sinh against the table
    for (int k = 0; k < 5; ++k) {
        Real x = d.a - Real("0.5") + (d.b - d.a + 1) * k / 4;
        // the quotient cancels near y = x, so ask for fewer digits here
        PrecisionContext loose = c;
        loose.quad_rel_tol = pow10(-30);
        auto f = [&](const Real& y) -> Real {
            if (y == x) return Real(0);
            return log(abs((exp(x) - exp(y)) / (x - y))) * e.table.psi(y);
        };
        Real direct = (x > d.a && x < d.b) ? Real(integrate_tanh_sinh(f, RealInterval(d.a, x), loose) +
                                                  integrate_tanh_sinh(f, RealInterval(x, d.b), loose))
                                           : integrate_tanh_sinh(f, RealInterval(d.a, d.b), loose);
        direct /= 2;
        CHECK(abs(direct - F_real(d, e.table, x, c)) < pow10(-16));
    }
}

TEST_CASE("F is Lipschitz near a bulk point, also in t") {
    const auto& c = ctx64();
    ScopedPrecision g(64);
    const auto& e = quart1();
    Real xs = (e.data.a + e.data.b) / 2;
    auto lip = [&](const Real& step) {
        Real best = 0;
        for (int i = -2; i <= 2; ++i)
            for (int j = i + 1; j <= 2; ++j) {
                Real u = xs + step * i, v = xs + step * j;
                Real q = abs(F_real(e.data, e.table, u, c) - F_real(e.data, e.table, v, c)) / abs(u - v);
                if (q > best) best = q;
            }
        return best;
    };
    Real c1 = lip(Real("0.1")), c2 = lip(Real("0.05"));
    CHECK(c1 < 10);
    CHECK(abs(c1 - c2) < c1 / 2);

    // second-order bound in (u, t)
    Equilibrium e2 = solve_equilibrium(quartic(), Real("0.9"), c, 128);
    auto mixed = [&](const Real& step) {
        Real best = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                Real u = xs + step * i, v = xs + step * j;
                Real num = F_real(e.data, e.table, u, c) - F_real(e.data, e.table, v, c) -
                           F_real(e2.data, e2.table, u, c) + F_real(e2.data, e2.table, v, c);
                Real q = abs(num) / (abs(u - v) * Real("0.1"));
                if (q > best) best = q;
            }
        return best;
    };
    Real m1 = mixed(Real("0.1")), m2 = mixed(Real("0.05"));
    CHECK(m1 < 10);
    CHECK(abs(m1 - m2) < m1 / 2);
}

TEST_CASE("Euler-Lagrange conditions") {
    const auto& c = ctx64();
    for (const auto* e : {&quad1(), &quart1()}) {
        ScopedPrecision g(64);
        const auto& d = e->data;
        for (int k = 1; k < 6; ++k) {
            Real y = d.a + (d.b - d.a) * k / 6;
            CHECK(abs(effective_potential(d, e->table, y, c)) < pow10(-16));
        }
        CHECK(effective_potential(d, e->table, d.b + Real("0.5"), c) < 0);
        CHECK(effective_potential(d, e->table, d.a - Real("0.5"), c) < 0);
        CHECK(effective_potential(d, e->table, Real(50), c) < -100);
        CHECK(effective_potential(d, e->table, Real(-50), c) < -100);
    }
    ScopedPrecision g(64);
    CHECK(abs(quad1().data.ell + Real("0.5")) < pow10(-30));
}

TEST_CASE("t dependence: monotone endpoints and collapse to the minimum") {
    PrecisionContext c = PrecisionContext::with_digits(40);
    ScopedPrecision g(40);
    Potential v = Potential::from_decimal({"0", "0.3", "0.5", "0", "0.05"}, 40);
    Real prev_a = 1e9, prev_b = -1e9;
    for (const char* ts : {"0.25", "0.5", "1", "2"}) {
        Equilibrium e = solve_equilibrium(v, Real(ts), c, 64);
        CHECK(e.data.a < prev_a);
        CHECK(e.data.b > prev_b);
        prev_a = e.data.a;
        prev_b = e.data.b;
    }
    Real xm = v.tilted_argmin(Real(0));
    Real w_prev = 1e9;
    for (const char* ts : {"1e-2", "1e-3"}) {
        Equilibrium e = solve_equilibrium(v, Real(ts), c, 64);
        Real w = e.data.b - e.data.a;
        CHECK(w < w_prev);
        CHECK(abs(e.data.a - xm) < 2 * w);
        CHECK(abs(e.data.b - xm) < 2 * w);
        w_prev = w;
    }
    CHECK(w_prev < Real("0.5"));
}

TEST_CASE("reflection maps the support to [-b, -a] with a unit linear term") {
    const auto& c = ctx64();
    ScopedPrecision g(64);
    Potential r = reflect_potential(quartic(), Rational(1));
    Equilibrium e = solve_equilibrium(r, Real(1), c, 128);
    CHECK(abs(e.data.a + quart1().data.b) < Real("1e-6"));
    CHECK(abs(e.data.b + quart1().data.a) < Real("1e-6"));
}

TEST_CASE("equilibrium cache round trip is exact") {
    const auto& c = ctx64();
    ScopedPrecision g(64);
    auto path = (std::filesystem::temp_directory_path() / "xs_eq_cache_test.json").string();
    save_equilibrium(path, quart1(), "1");
    auto back = load_equilibrium(path, quartic(), "1", c);
    REQUIRE(back.has_value());
    const auto& a = quart1().data;
    const auto& b = back->data;
    CHECK(a.c0 == b.c0);
    CHECK(a.c1 == b.c1);
    CHECK(a.a == b.a);
    CHECK(a.b == b.b);
    CHECK(a.alpha == b.alpha);
    CHECK(a.beta == b.beta);
    CHECK(a.ell == b.ell);
    CHECK_FALSE(load_equilibrium(path, quartic(), "2", c).has_value());
    CHECK_FALSE(load_equilibrium(path, quadratic(), "1", c).has_value());
    std::remove(path.c_str());
}
