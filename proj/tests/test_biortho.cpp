#include "doctest.h"

#include "xs/airy.hpp"
#include "xs/biortho.hpp"
#include "xs/errors.hpp"

#include <filesystem>
#include <fstream>
#include <map>

using namespace xs;
using boost::multiprecision::abs;
using boost::multiprecision::exp;
using boost::multiprecision::log;
using boost::multiprecision::pow;
using boost::multiprecision::sqrt;

namespace {

Potential quadratic(int d) { return Potential::from_decimal({"0", "0", "0.5"}, d); }
Potential quartic(int d) { return Potential::from_decimal({"0", "0", "0.5", "0", "0.05"}, d); }

// one system per (potential, n, m), built at the default digit count
const BiorthoSystem& system_for(bool quart, int n, int m) {
    static std::map<std::tuple<bool, int, int>, BiorthoSystem> cache;
    auto key = std::make_tuple(quart, n, m);
    auto it = cache.find(key);
    if (it == cache.end()) {
        const int d = default_biortho_digits(n);
        ScopedPrecision g(d);
        auto V = quart ? quartic(d) : quadratic(d);
        it = cache.emplace(key, construct(V, n, m, PrecisionContext::with_digits(d))).first;
    }
    return it->second;
}

const PrecisionContext& ctx_of(const BiorthoSystem& s) {
    static std::map<int, PrecisionContext> cache;
    auto it = cache.find(s.digits);
    if (it == cache.end()) it = cache.emplace(s.digits, PrecisionContext::with_digits(s.digits)).first;
    return it->second;
}

const Equilibrium& eq_at(int j, int n) {
    static std::map<std::pair<int, int>, Equilibrium> cache;
    auto it = cache.find({j, n});
    if (it == cache.end()) {
        ScopedPrecision g(64);
        auto c = PrecisionContext::with_digits(64);
        it = cache.emplace(std::make_pair(j, n), solve_equilibrium(quadratic(64), Real(j) / n, c)).first;
    }
    return it->second;
}

Real h_ratio_defect(int n) {
    const BiorthoSystem& s = system_for(false, n, n);
    const EquilibriumData& e = eq_at(1, 1).data;
    ScopedPrecision g(s.digits);
    Real pred = 2 * pi() * sqrt(Real(e.c1)) * exp(Real(n * e.ell));
    return abs(s.h[n] / pred - 1);
}

}  // namespace

TEST_CASE("bimoments: Gaussian closed forms") {
    ScopedPrecision g(64);
    auto c = PrecisionContext::with_digits(64);
    BimomentMatrix b1 = bimoments(quadratic(64), 1, 2, c);
    const Real root2pi = sqrt(2 * pi());
    CHECK(abs(b1.M(0, 0) - root2pi) < pow10(-55));
    CHECK(abs(b1.M(0, 1) - root2pi * exp(Real(0.5))) < pow10(-55));
    // n = 4: e^{j^2/8} sqrt(pi/2) E[(Z + j/4)^2], Var Z = 1/4
    BimomentMatrix b4 = bimoments(quadratic(64), 4, 3, c);
    Real want = exp(Real(1) / 8) * sqrt(pi() / 2) * (Real(1) / 4 + Real(1) / 16);
    CHECK(abs(b4.M(2, 1) - want) < pow10(-55));
    CHECK(b4.window.lo < -3);
    CHECK(b4.window.hi > 3);
    CHECK_THROWS_AS(bimoments(quadratic(64), 4, 13, c), ValidationError);
    CHECK_THROWS_AS(bimoments(quadratic(64), 0, 0, c), ValidationError);
}

TEST_CASE("construct: low degrees for the Gaussian weight") {
    ScopedPrecision g(64);
    auto c = PrecisionContext::with_digits(64);
    BiorthoSystem s = construct(quadratic(64), 1, 2, c);
    CHECK(abs(s.h[0] - sqrt(2 * pi())) < pow10(-55));
    CHECK(s.p[0].size() == 1);
    CHECK(s.p[0][0] == 1);
    CHECK(s.q[0][0] == 1);
    CHECK(abs(s.p[1][0]) < pow10(-55));
    CHECK(s.p[1][1] == 1);
    CHECK(abs(s.q[1][0] + exp(Real(0.5))) < pow10(-55));
    CHECK(s.q[1][1] == 1);
    ZeroSet z = zeros(s, 1, c);
    REQUIRE(z.zeros_p.size() == 1);
    REQUIRE(z.zeros_qx.size() == 1);
    CHECK(abs(z.zeros_p[0]) < pow10(-55));
    CHECK(abs(z.zeros_qx[0] - Real(0.5)) < pow10(-55));
    CHECK_THROWS_AS(zeros(s, 3, c), ValidationError);
}

TEST_CASE("orthogonality defect, positivity and the lower bound on h") {
    for (auto [quart, n] : {std::pair{false, 8}, std::pair{false, 16}, std::pair{true, 8}}) {
        const BiorthoSystem& s = system_for(quart, n, n);
        const auto& c = ctx_of(s);
        ScopedPrecision g(s.digits);
        CHECK(orthogonality_defect(s, c) < pow10(-(s.digits / 3)));
        const Real xmin = s.V.tilted_argmin(Real(0));
        for (int j = 0; j <= n; ++j) {
            CHECK(s.h[j] > 0);
            CHECK(s.h[j] >= exp(-n * (s.V.value(xmin) + 1)));
        }
    }
}

TEST_CASE("zeros: interlacing for both families") {
    for (auto [quart, n] : {std::pair{false, 8}, std::pair{false, 16}, std::pair{true, 8}}) {
        const BiorthoSystem& s = system_for(quart, n, n);
        const auto& c = ctx_of(s);
        ScopedPrecision g(s.digits);
        auto z = all_zeros(s, c);
        for (int j = 1; j <= n; ++j) {
            CHECK(z[j].zeros_p.size() == size_t(j));
            CHECK(interlaces(z[j - 1].zeros_p, z[j].zeros_p));
            CHECK(interlaces(z[j - 1].zeros_qx, z[j].zeros_qx));
        }
        // zeros() walks the same chain
        ZeroSet z5 = zeros(s, 5, c);
        for (int k = 0; k < 5; ++k) CHECK(z5.zeros_p[k] == z[5].zeros_p[k]);
    }
    CHECK(interlaces({Real(0)}, {Real(-1), Real(1)}));
    CHECK_FALSE(interlaces({Real(2)}, {Real(-1), Real(1)}));
}

TEST_CASE("zeros: degree n sits inside the support, low degrees near x_min") {
    const BiorthoSystem& s = system_for(false, 24, 24);
    const auto& c = ctx_of(s);
    const EquilibriumData& e = eq_at(1, 1).data;
    ScopedPrecision g(s.digits);
    ZeroSet z = zeros(s, 24, c);
    for (const auto& x : z.zeros_p) {
        CHECK(x > e.a - Real(0.2));
        CHECK(x < e.b + Real(0.2));
    }
    for (const auto& x : z.zeros_qx) {
        CHECK(x > e.a - Real(0.2));
        CHECK(x < e.b + Real(0.2));
    }
    // j <= n/8 at n = 32
    const BiorthoSystem& s32 = system_for(false, 32, 4);
    ScopedPrecision g2(s32.digits);
    const Real xmin = s32.V.tilted_argmin(Real(0));
    auto zz = all_zeros(s32, ctx_of(s32));
    for (int j = 1; j <= 4; ++j)
        for (const auto* v : {&zz[j].zeros_p, &zz[j].zeros_qx})
            for (const auto& x : *v) CHECK(abs(x - xmin) < Real(0.5));
}

TEST_CASE("Cauchy transform of q") {
    const BiorthoSystem& s = system_for(false, 8, 8);
    const auto& c = ctx_of(s);
    ScopedPrecision g(s.digits);
    for (int j : {0, 3}) {
        Complex z(Real("0.3"), Real("0.7"));
        Complex a = cauchy_transform_q(s, j, z, c), b = cauchy_transform_q(s, j, conj(z), c);
        // the 1/(2 pi i) in front flips the sign
        CHECK(abs(a + conj(b)) < 10 * c.quad_rel_tol);
        Real m3 = abs(Complex(0, 1000) * cauchy_transform_q(s, j, Complex(0, 1000), c));
        Real m4 = abs(Complex(0, 10000) * cauchy_transform_q(s, j, Complex(0, 10000), c));
        CHECK(m3 < 1);
        CHECK(m4 < 1);
    }
    // degree 0: z Cq_0(z) -> -h_0 / (2 pi i)
    Real lim = s.h[0] / (2 * pi());
    Complex z(0, Real(10000));
    Real m = abs(z * cauchy_transform_q(s, 0, z, c));
    CHECK(abs(m - lim) < lim * Real(1e-6));
    CHECK_THROWS_AS(cauchy_transform_q(s, 0, Complex(Real(1)), c), ValidationError);
}

TEST_CASE("Cauchy transform: Gaussian j = 0 against a doubled-precision tanh-sinh") {
    ScopedPrecision g(64);
    auto c = PrecisionContext::with_digits(64);
    BiorthoSystem s = construct(quadratic(64), 1, 1, c);
    Complex z(0, 2);
    Complex got = cauchy_transform_q(s, 0, z, c);
    ScopedPrecision g2(128);
    auto c2 = PrecisionContext::with_digits(128);
    Complex zz(Real(0), Real(2));
    Complex ref = integrate_tanh_sinh_complex(
        [&](const Real& x) { return Complex(Real(exp(-x * x / 2))) / (Complex(x) - zz); },
        RealInterval(Real(-40), Real(40)), c2);
    ref = Complex(ref.im, -ref.re) / (2 * pi());
    CHECK(abs(got - ref) < abs(ref) * pow10(-10));
}

TEST_CASE("conjugated pair: biorthonormality") {
    const BiorthoSystem& s = system_for(false, 8, 8);
    const auto& c = ctx_of(s);
    ScopedPrecision g(s.digits);
    for (auto [i, j] : {std::pair{2, 2}, std::pair{5, 5}, std::pair{8, 8}, std::pair{3, 6}, std::pair{7, 4}}) {
        const EquilibriumData& ei = eq_at(i, 8).data;
        const EquilibriumData& ej = eq_at(j, 8).data;
        Real v = integrate_gauss_legendre(
            [&](const Real& x) {
                return Real(conjugated_pair(s, ei, i, x, c).first * conjugated_pair(s, ej, j, x, c).second);
            },
            s.window, c);
        CHECK(abs(v - (i == j ? 1 : 0)) < pow10(-(s.digits / 3)));
    }
    CHECK_THROWS_AS(conjugated_pair(s, eq_at(1, 1).data, 4, Real(0), c), ValidationError);
}

TEST_CASE("norming constants approach 2 pi c1^(1/2) e^(n l)") {
    Real d8 = h_ratio_defect(8), d16 = h_ratio_defect(16);
    MESSAGE("h ratio defect n=8: " << to_decimal(d8, 4) << "  n=16: " << to_decimal(d16, 4));
    CHECK(d16 < d8);
    // roughly 1/n
    CHECK(d8 / d16 > Real(1.4));
    CHECK(d8 / d16 < Real(3));
}

TEST_CASE("bulk and edge asymptotics of p~_n at n = 32") {
    const int n = 32;
    const BiorthoSystem& s = system_for(false, n, n);
    const auto& c = ctx_of(s);
    const Equilibrium& E = eq_at(1, 1);
    const EquilibriumData& e = E.data;
    auto c64 = PrecisionContext::with_digits(64);

    // bulk: e^{nF} p~_n(x* + u/(pi psi n)) = r_{1,0}(x*) cos(phase - u) + O(1/n)
    Real xs, psi, r10;
    {
        ScopedPrecision g(64);
        xs = (e.a + e.b) / 2;
        psi = E.table.psi(xs);
        r10 = 2 * abs(G_tk(e, 0, inverse_map(e, xs, Branch::upper, c64)));
    }
    const int K = 16;
    Real A = 0, B = 0;
    for (int k = 0; k < K; ++k) {
        Real u, x, F;
        {
            ScopedPrecision g(64);
            u = 2 * pi() * k / K;
            x = xs + u / (pi() * psi * n);
            F = F_real(e, E.table, x, c64);
        }
        ScopedPrecision g(s.digits);
        Real v = exp(n * F) * conjugated_pair(s, e, n, x, c).first;
        A += v * cos(u) * 2 / K;
        B += v * sin(u) * 2 / K;
    }
    Real amp = sqrt(A * A + B * B);
    MESSAGE("bulk amplitude " << to_decimal(amp, 6) << " vs r_{1,0} " << to_decimal(r10, 6));
    CHECK(abs(amp / r10 - 1) < Real(0.1));

    // right edge: (pi beta n)^{-1/6} e^{nF} p~_n(b + u/(pi beta n)^{2/3}) -> const * Ai(u)
    Real scale, pref;
    {
        ScopedPrecision g(64);
        scale = pow(pi() * e.beta * n, Real(2) / 3);
        pref = sqrt(2 * pi()) / (sqrt(e.c1) * (e.s_b - Real(0.5)) * pow(e.s_b, Real(0.25)));
    }
    for (int u : {-1, 0, 1, 2}) {
        Real x, F, ai;
        {
            ScopedPrecision g(64);
            x = e.b + u / scale;
            F = F_real(e, E.table, x, c64);
            ai = airy(Real(u), c64).ai;
        }
        ScopedPrecision g(s.digits);
        Real v = exp(n * F) * conjugated_pair(s, e, n, x, c).first / sqrt(sqrt(scale));
        MESSAGE("edge u=" << u << " value " << to_decimal(v, 6) << " predicted " << to_decimal(Real(pref * ai), 6));
        CHECK(abs(v / (pref * ai) - 1) < Real(0.15));
    }
}

TEST_CASE("biortho cache round trip and validation on load") {
    const BiorthoSystem& s = system_for(false, 8, 8);
    const auto& c = ctx_of(s);
    ScopedPrecision g(s.digits);
    auto dir = std::filesystem::temp_directory_path() / "xs_test_biortho";
    std::filesystem::create_directories(dir);
    std::string path = (dir / "sys.json").string();
    save_biortho(path, s);
    auto back = load_biortho(path, s.V, 8, 8, c);
    REQUIRE(back.has_value());
    for (int j = 0; j <= 8; ++j) {
        CHECK(back->h[j] == s.h[j]);
        for (int k = 0; k <= j; ++k) CHECK(back->q[j][k] == s.q[j][k]);
    }
    CHECK_FALSE(load_biortho(path, s.V, 8, 7, c).has_value());
    CHECK_FALSE(load_biortho((dir / "missing.json").string(), s.V, 8, 8, c).has_value());
    // damage one norming constant
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    auto pos = text.find("\"h\"");
    REQUIRE(pos != std::string::npos);
    pos = text.find('"', text.find('[', pos)) + 1;
    text.insert(pos, "2");
    std::ofstream(path) << text;
    CHECK_THROWS_AS(load_biortho(path, s.V, 8, 8, c), IoError);
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_biortho(path, s.V, 8, 8, c), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("too few digits shows up in the defect and the zeros") {
    ScopedPrecision g(32);
    auto c = PrecisionContext::with_digits(32);
    BiorthoSystem s = construct(quadratic(32), 32, 32, c);
    CHECK(orthogonality_defect(s, c) > pow10(-(32 / 3)));
    CHECK_THROWS_AS(all_zeros(s, c), NumericalError);
}
