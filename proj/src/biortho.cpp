#include "xs/biortho.hpp"

#include "xs/errors.hpp"
#include "xs/poly.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace xs {

using boost::multiprecision::abs;
using boost::multiprecision::exp;
using boost::multiprecision::log;
using boost::multiprecision::sqrt;

int default_biortho_digits(int n) { return std::max(64, 12 * n); }

namespace {

void check_degree(const BiorthoSystem& sys, int j, const char* who) {
    if (j < 0 || j > sys.m)
        throw ValidationError(std::string(who) + ": degree " + std::to_string(j) + " outside 0.." +
                              std::to_string(sys.m));
}

Potential at_digits(const Potential& V, int digits) { return V.digits() == digits ? V : V.at(digits); }

}  // namespace

RealInterval support_window(const Potential& V, int n, int m, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const Potential Vd = at_digits(V, ctx.digits);
    const Real nn(n), mm(m);
    auto phi = [&](const Real& x) -> Real {
        Real ax = abs(x);
        return mm * (x > 0 ? x : Real(0)) + mm * log(1 + ax) - nn * Vd.value(x);
    };
    // the peak sits where nV' balances at most 2m
    Real lo = Vd.tilted_argmin(Real(-mm / nn) - 1), hi = Vd.tilted_argmin(Real(2 * mm / nn) + 1);
    Real peak = phi(lo);
    for (int i = 1; i <= 400; ++i) peak = std::max(peak, phi(Real(lo + (hi - lo) * i / 400)));
    const Real target = peak - (ctx.digits + 10) * log(Real(10));
    auto edge = [&](Real inside, Real step) {
        Real outside = inside + step;
        while (phi(outside) > target) {
            inside = outside;
            step *= 2;
            outside = inside + step;
        }
        for (int it = 0; it < 200; ++it) {
            Real mid = (inside + outside) / 2;
            (phi(mid) > target ? inside : outside) = mid;
        }
        return outside;
    };
    return RealInterval(edge(lo, Real(-1)), edge(hi, Real(1)));
}

BimomentMatrix bimoments(const Potential& V, int n, int m, const PrecisionContext& ctx) {
    ctx.validate();
    if (n < 1) throw ValidationError("bimoments: n must be positive");
    if (m < 0 || m > n + 8) throw ValidationError("bimoments: need 0 <= m <= n + 8");
    ScopedPrecision guard(ctx.digits);
    const Potential Vd = at_digits(V, ctx.digits);
    BimomentMatrix out;
    out.n = n;
    out.m = m;
    out.window = support_window(Vd, n, m, ctx);
    const size_t d = m + 1;
    auto f = [&](const Real& x, std::vector<Real>& o) {
        const Real w = exp(-n * Vd.value(x));
        const Real ex = exp(x);
        Real xi = w;
        for (size_t i = 0; i < d; ++i) {
            Real v = xi;
            for (size_t j = 0; j < d; ++j) {
                o[i * d + j] = v;
                v *= ex;
            }
            xi *= x;
        }
    };
    std::vector<Real> r = integrate_gauss_legendre(f, d * d, out.window, ctx);
    out.M = Matrix(d, d);
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) out.M(i, j) = r[i * d + j];
    return out;
}

BiorthoSystem construct(const Potential& V, int n, int m, const PrecisionContext& ctx) {
    BimomentMatrix bm = bimoments(V, n, m, ctx);
    ScopedPrecision guard(ctx.digits);
    LDU f = ldu_bidiagonalize(bm.M, ctx);
    for (int k = 0; k <= m; ++k)
        if (!(f.D[k] > 0))
            throw NonPositiveMinor(k, "construct: leading minor " + std::to_string(k + 1) +
                                          " of the bimoment matrix is not positive; raise --digits");
    const Matrix A = unit_lower_inverse(f.L);  // rows: p_i
    const Matrix B = unit_upper_inverse(f.U);  // columns: q_j
    BiorthoSystem s;
    s.n = n;
    s.m = m;
    s.digits = ctx.digits;
    s.V = at_digits(V, ctx.digits);
    s.window = bm.window;
    s.h = f.D;
    s.p.resize(m + 1);
    s.q.resize(m + 1);
    for (int j = 0; j <= m; ++j) {
        for (int k = 0; k <= j; ++k) {
            s.p[j].push_back(A(j, k));
            s.q[j].push_back(B(k, j));
        }
        s.p[j][j] = 1;
        s.q[j][j] = 1;
    }
    return s;
}

Real BiorthoSystem::p_at(int j, const Real& x) const { return horner(p[j], x); }
Real BiorthoSystem::q_at(int j, const Real& x) const { return horner(q[j], Real(exp(x))); }
Real BiorthoSystem::weight(const Real& x) const { return exp(-n * V.value(x)); }
Real BiorthoSystem::p_half(int j, const Real& x) const { return exp(-n * V.value(x) / 2) * p_at(j, x); }
Real BiorthoSystem::q_half(int j, const Real& x) const { return exp(-n * V.value(x) / 2) * q_at(j, x) / h[j]; }

bool interlaces(const std::vector<Real>& inner, const std::vector<Real>& outer) {
    if (outer.size() != inner.size() + 1) return false;
    for (size_t k = 0; k < inner.size(); ++k)
        if (!(outer[k] < inner[k] && inner[k] < outer[k + 1])) return false;
    return true;
}

namespace {

std::vector<Real> real_roots(const std::vector<Real>& c, const std::vector<Real>& separators, const char* what,
                             const PrecisionContext& ctx) {
    if (c.size() <= 1) return {};
    if (auto r = roots_between(c, separators, ctx)) return *r;
    // no sign change in some bracket: the previous degree does not interlace, so solve from scratch
    std::vector<Real> out;
    for (const Complex& z : aberth_roots(c, ctx)) {
        if (abs(z.im) > pow10(-(ctx.digits / 2)) * (1 + abs(z.re)))
            throw ComplexRootDetected(std::string("zeros: ") + what + " has a complex root " + to_decimal(z.re, 8) +
                                      (z.im < 0 ? " - " : " + ") + to_decimal(abs(z.im), 8) +
                                      "i; precision is too low");
        out.push_back(z.re);
    }
    std::sort(out.begin(), out.end());
    return out;
}

ZeroSet zeros_from(const BiorthoSystem& sys, int j, const ZeroSet* prev, const PrecisionContext& ctx) {
    ZeroSet z;
    z.degree = j;
    std::vector<Real> sep_p, sep_y;
    if (prev) {
        sep_p = prev->zeros_p;
        for (const auto& x : prev->zeros_qx) sep_y.push_back(exp(x));
    }
    z.zeros_p = real_roots(sys.p[j], sep_p, "p_j", ctx);
    for (const Real& y : real_roots(sys.q[j], sep_y, "q_j", ctx)) {
        if (!(y > 0))
            throw ComplexRootDetected("zeros: q_j has a root y = " + to_decimal(y, 8) +
                                      " <= 0, so q_j(e^x) lost a real zero; precision is too low");
        z.zeros_qx.push_back(log(y));
    }
    return z;
}

}  // namespace

std::vector<ZeroSet> all_zeros(const BiorthoSystem& sys, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    std::vector<ZeroSet> out;
    for (int j = 0; j <= sys.m; ++j) out.push_back(zeros_from(sys, j, j ? &out.back() : nullptr, ctx));
    return out;
}

ZeroSet zeros(const BiorthoSystem& sys, int j, const PrecisionContext& ctx) {
    check_degree(sys, j, "zeros");
    ScopedPrecision guard(ctx.digits);
    ZeroSet z;
    for (int k = 0; k <= j; ++k) z = zeros_from(sys, k, k ? &z : nullptr, ctx);
    return z;
}

Complex cauchy_transform_q(const BiorthoSystem& sys, int j, const Complex& z, const PrecisionContext& ctx) {
    check_degree(sys, j, "cauchy_transform_q");
    if (z.im == 0) throw ValidationError("cauchy_transform_q: z must be off the real axis");
    ScopedPrecision guard(ctx.digits);
    auto f = [&](const Real& s, std::vector<Real>& o) {
        Complex v = Complex(sys.q_at(j, s) * sys.weight(s)) / (Complex(s) - z);
        o[0] = v.re;
        o[1] = v.im;
    };
    std::vector<Real> r = integrate_gauss_legendre(f, 2, sys.window, ctx);
    // 1/(2 pi i) = -i/(2 pi)
    const Real tp = 2 * pi();
    return Complex(r[1] / tp, -r[0] / tp);
}

std::pair<Real, Real> conjugated_pair(const BiorthoSystem& sys, const EquilibriumData& eq, int j, const Real& x,
                                      const PrecisionContext& ctx) {
    check_degree(sys, j, "conjugated_pair");
    ScopedPrecision guard(ctx.digits);
    if (j == 0) return {sys.p_half(0, x), sys.q_half(0, x)};
    if (abs(eq.t - Real(j) / sys.n) > pow10(-(std::min(ctx.digits, eq.digits) / 2)))
        throw ValidationError("conjugated_pair: equilibrium data is for t = " + to_decimal(eq.t, 8) + ", need j/n = " +
                              std::to_string(j) + "/" + std::to_string(sys.n));
    const Real g = exp(Real(j) * eq.ell / 2);
    return {sys.p_half(j, x) / g, sys.q_half(j, x) * g};
}

Matrix pairing_matrix(const BiorthoSystem& sys, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const size_t d = sys.m + 1;
    auto f = [&](const Real& x, std::vector<Real>& o) {
        const Real w = sys.weight(x);
        const Real y = exp(x);
        thread_local std::vector<Real> pv, qv;
        pv.resize(d);
        qv.resize(d);
        for (size_t i = 0; i < d; ++i) {
            pv[i] = horner(sys.p[i], x) * w;
            qv[i] = horner(sys.q[i], y);
        }
        for (size_t i = 0; i < d; ++i)
            for (size_t j = 0; j < d; ++j) o[i * d + j] = pv[i] * qv[j];
    };
    // p_i and q_j(e^x) are summed in the monomial basis and cancel heavily, so the integrand
    // carries far more rounding than the bimoments did; d/2 digits is still well below the
    // 10^-(d/3) the defect is judged against
    PrecisionContext loose = ctx;
    loose.quad_rel_tol = std::max(ctx.quad_rel_tol, Real(pow10(-(ctx.digits / 2))));
    std::vector<Real> r = integrate_gauss_legendre(f, d * d, sys.window, loose);
    Matrix out(d, d);
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) out(i, j) = r[i * d + j];
    return out;
}

Real orthogonality_defect(const BiorthoSystem& sys, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    Matrix P = pairing_matrix(sys, ctx);
    Real hmax = *std::max_element(sys.h.begin(), sys.h.end());
    Real worst = 0;
    for (int i = 0; i <= sys.m; ++i)
        for (int j = 0; j <= sys.m; ++j) {
            Real e = abs(P(i, j) - (i == j ? sys.h[i] : Real(0)));
            worst = std::max(worst, e);
        }
    return worst / hmax;
}

namespace {

Complex sqrt_sb(const EquilibriumData& eq, const Complex& s) {
    return sqrt(s - Complex(eq.s_b)) * sqrt(s + Complex(eq.s_b));
}

Complex ipow(const Complex& z, int k) {
    Complex r(1);
    for (int i = 0; i < std::abs(k); ++i) r *= z;
    return k < 0 ? Complex(1) / r : r;
}

}  // namespace

Complex G_tk(const EquilibriumData& eq, int k, const Complex& s) {
    const Real h = Real(1) / 2;
    Real ck = 1;
    for (int i = 0; i < std::abs(k); ++i) ck *= eq.c1;
    if (k < 0) ck = 1 / ck;
    return ck * (s + Complex(h)) * ipow(s - Complex(h), k) / sqrt_sb(eq, s);
}

Complex G_hat_tk(const EquilibriumData& eq, int k, const Complex& s) {
    const Real h = Real(1) / 2;
    const Real pre = exp(k * (eq.c1 / 2 + eq.c0)) / sqrt(eq.c1);
    return Complex(Real(0), pre) * ipow(s - Complex(h), -k) / sqrt_sb(eq, s);
}

// --- cache -------------------------------------------------------------------

std::string biortho_cache_key(const Potential& V, int n, int m, int digits) {
    return "V=" + V.key() + ";n=" + std::to_string(n) + ";m=" + std::to_string(m) + ";digits=" + std::to_string(digits);
}

void save_biortho(const std::string& path, const BiorthoSystem& sys) {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = "biortho";
    j["key"] = biortho_cache_key(sys.V, sys.n, sys.m, sys.digits);
    j["n"] = sys.n;
    j["m"] = sys.m;
    j["digits"] = sys.digits;
    std::vector<std::string> v;
    for (const auto& q : sys.V.exact()) v.push_back(rational_to_string(q));
    j["V"] = v;
    j["window"] = {to_decimal(sys.window.lo), to_decimal(sys.window.hi)};
    auto dump = [](const std::vector<std::vector<Real>>& c) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& row : c) {
            std::vector<std::string> r;
            for (const auto& x : row) r.push_back(to_decimal(x));
            a.push_back(r);
        }
        return a;
    };
    j["p"] = dump(sys.p);
    j["q"] = dump(sys.q);
    std::vector<std::string> h;
    for (const auto& x : sys.h) h.push_back(to_decimal(x));
    j["h"] = h;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write biortho cache " + path);
    out << j.dump(1) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

std::optional<BiorthoSystem> load_biortho(const std::string& path, const Potential& V, int n, int m,
                                          const PrecisionContext& ctx) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw IoError("corrupt biortho cache " + path + ": " + ex.what());
    }
    if (j.value("version", 0) != 1 || j.value("key", std::string()) != biortho_cache_key(V, n, m, ctx.digits))
        return std::nullopt;
    ScopedPrecision guard(ctx.digits);
    BiorthoSystem s;
    try {
        s.n = n;
        s.m = m;
        s.digits = ctx.digits;
        s.V = at_digits(V, ctx.digits);
        auto w = j.at("window");
        s.window = RealInterval(from_decimal(w.at(0).get<std::string>(), ctx.digits),
                                from_decimal(w.at(1).get<std::string>(), ctx.digits));
        auto read = [&](const nlohmann::json& a) {
            std::vector<std::vector<Real>> c;
            for (const auto& row : a) {
                std::vector<Real> r;
                for (const auto& x : row) r.push_back(from_decimal(x.get<std::string>(), ctx.digits));
                c.push_back(r);
            }
            return c;
        };
        s.p = read(j.at("p"));
        s.q = read(j.at("q"));
        for (const auto& x : j.at("h")) s.h.push_back(from_decimal(x.get<std::string>(), ctx.digits));
    } catch (const nlohmann::json::exception& ex) {
        throw IoError("biortho cache " + path + " is malformed: " + ex.what());
    }
    const size_t d = m + 1;
    bool shape = s.p.size() == d && s.q.size() == d && s.h.size() == d;
    for (size_t k = 0; shape && k < d; ++k) shape = s.p[k].size() == k + 1 && s.q[k].size() == k + 1;
    if (!shape) throw IoError("biortho cache " + path + " has the wrong shape for m = " + std::to_string(m));
    Real defect = orthogonality_defect(s, ctx);
    if (defect > pow10(-(ctx.digits / 3)))
        throw IoError("biortho cache " + path + " fails the orthogonality check (defect " + to_decimal(defect, 4) + ")");
    return s;
}

}  // namespace xs
