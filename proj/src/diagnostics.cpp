#include "xs/diagnostics.hpp"

#include "xs/errors.hpp"
#include "xs/poly.hpp"

#include <algorithm>
#include <cmath>

namespace xs {

using boost::multiprecision::abs;
using boost::multiprecision::exp;
using boost::multiprecision::floor;
using boost::multiprecision::log;
using boost::multiprecision::pow;

SplitBounds split_bounds(int n, const Real& delta, const Real& delta_prime, int M) {
    if (n < 1 || M < 1 || !(delta > 0 && delta < 1) || !(delta_prime > 0 && delta_prime < 1))
        throw ValidationError("kernel_split: need n >= 1, M >= 1 and delta, delta' in (0, 1)");
    auto fl = [](const Real& x) { return static_cast<int>(floor(x).convert_to<long>()); };
    int e1 = std::min(fl(delta * n), n - 1);
    int e2 = fl((1 - delta_prime) * n);
    int e3 = fl(n - M * std::cbrt(double(n)));
    e3 = std::clamp(e3, e1, n - 1);
    e2 = std::clamp(e2, e1, e3);
    SplitBounds b;
    b.last = {e1, e2, e3, n - 1};
    return b;
}

KernelSplit kernel_split(const BiorthoSystem& sys, const Equilibrium& eq1, const Real& delta,
                         const Real& delta_prime, int M, const Real& u, const Real& v, const PrecisionContext& ctx) {
    if (sys.m < sys.n - 1) throw ValidationError("kernel_split: system lacks degrees below n");
    KernelSplit out;
    out.bounds = split_bounds(sys.n, delta, delta_prime, M);
    const PrecisionContext ce = PrecisionContext::with_digits(eq1.data.digits);
    const Real fu = F_real(eq1.data, eq1.table, u, ce), fv = F_real(eq1.data, eq1.table, v, ce);
    ScopedPrecision guard(ctx.digits);
    const Real w = exp(-Real(sys.n) * (sys.V.value(u) + sys.V.value(v)) / 2);
    const Real ev = exp(v);
    const Real conj = exp(Real(sys.n) * (fu - fv));
    int part = 0;
    for (auto& p : out.parts) p = 0;
    for (int j = 0; j < sys.n; ++j) {
        while (j > out.bounds.last[part]) ++part;
        out.parts[part] += horner(sys.p[j], u) * horner(sys.q[j], ev) / sys.h[j] * w;
    }
    out.total = 0;
    for (int i = 0; i < 4; ++i) {
        out.conjugated[i] = conj * out.parts[i];
        out.total += out.parts[i];
    }
    return out;
}

Real split_airy_reference(const EquilibriumData& eq1, int M, const Real& xi, const Real& eta,
                          const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const Real bprime = endpoint_derivatives(eq1).second;
    const Real L = pow(pi() * eq1.beta, Real(2) / 3) * bprime * M;
    return airy_tail_integral(xi, eta, L, ctx);
}

std::vector<Real> lagrange_table(const Potential& V, int n, int lo, int hi, int digits) {
    ScopedPrecision guard(digits);
    const auto ctx = PrecisionContext::with_digits(digits);
    const Potential Vd = V.at(digits);
    std::vector<Real> out;
    for (int j = lo; j <= hi; ++j)
        out.push_back(j == 0 ? Real(0) : solve_equilibrium(Vd, Real(j) / n, ctx).data.ell);
    return out;
}

const Real& CDDiagnostics::a(int j, int k) const {
    auto it = a_coeffs.find({j, k});
    if (it == a_coeffs.end()) throw ValidationError("a_{j,k} outside the computed range");
    return it->second;
}

const Real& CDDiagnostics::b(int j, int k) const {
    auto it = b_coeffs.find({j, k});
    if (it == b_coeffs.end()) throw ValidationError("b_{j,k} outside the computed range");
    return it->second;
}

Real exp_truncated(int k, const Real& x) {
    Real term = 1, s = 1;
    for (int i = 1; i <= k; ++i) {
        term *= x / i;
        s += term;
    }
    return s;
}

Complex exp_truncated(int k, const Complex& z) {
    Complex term(1), s(1);
    for (int i = 1; i <= k; ++i) {
        term = term * z / Complex(Real(i));
        s += term;
    }
    return s;
}

Real exp_truncation_ratio(int k, const Real& C2, const PrecisionContext& ctx) {
    if (k < 1) throw ValidationError("exp_truncation_ratio: k must be positive");
    ScopedPrecision guard(ctx.digits);
    // the tail has positive Taylor coefficients, so on |z| = C2 it is largest at z = C2
    Real term = 1;
    for (int i = 1; i <= k; ++i) term *= C2 / i;
    Real tail = 0;
    const Real eps = pow10(-ctx.digits);
    for (int i = k + 1;; ++i) {
        term *= C2 / i;
        tail += term;
        if (term < eps * tail) break;
    }
    return tail * exp(Real(k) / 2 * log(Real(k)));
}

Real alpha_limit(int l, const EquilibriumData& eq1) {
    if (l < -1) throw ValidationError("alpha_limit: need l >= -1");
    ScopedPrecision guard(eq1.digits);
    const Real E = exp(eq1.c1 / 2 + eq1.c0);
    if (l == -1) return eq1.c1 * E;
    Real fl = 1;
    for (int i = 2; i <= l; ++i) fl *= i;
    return (eq1.c1 / (fl * (l + 1)) + 1 / fl) * E;
}

int cd_degrees_needed(int n, const Real& delta, int M) {
    const int kd = static_cast<int>(floor(delta * n).convert_to<long>());
    return n - 1 + std::max(kd, M);
}

CDDiagnostics cd_coefficients(const BiorthoSystem& sys, const Real& delta, int M, const std::vector<Real>& ell,
                              const EquilibriumData& eq1, const PrecisionContext& ctx) {
    if (!(delta > 0 && delta < 1) || M < 1) throw ValidationError("cd_coefficients: need delta in (0, 1), M >= 1");
    const int n = sys.n, m = sys.m;
    const int need = cd_degrees_needed(n, delta, M);
    if (m < need)
        throw ValidationError("cd_coefficients: system has degrees 0.." + std::to_string(m) + ", need 0.." +
                              std::to_string(need));
    if (!ell.empty() && static_cast<int>(ell.size()) < m + 1)
        throw ValidationError("cd_coefficients: l table must cover degrees 0.." + std::to_string(m));
    ScopedPrecision guard(ctx.digits);
    CDDiagnostics d;
    d.n = n;
    d.M = M;
    d.delta = delta;
    d.k_delta = static_cast<int>(floor(delta * n).convert_to<long>());
    if (!ell.empty()) d.ell.assign(ell.begin(), ell.begin() + m + 1);

    const size_t D = m + 1;
    // e^x q_j(e^x) and exp_k(x) p_i(x) reach one (resp. k) degree past m
    const RealInterval win = support_window(sys.V, n, m + d.k_delta + 1, ctx);
    auto f = [&](const Real& x, std::vector<Real>& o) {
        const Real w = sys.weight(x);
        const Real y = exp(x);
        const Real ek = exp_truncated(d.k_delta, x);
        thread_local std::vector<Real> pv, qv;
        pv.resize(D);
        qv.resize(D);
        for (size_t i = 0; i < D; ++i) {
            pv[i] = horner(sys.p[i], x) * w;
            qv[i] = horner(sys.q[i], y);
        }
        for (size_t i = 0; i < D; ++i) {
            const Real pe = pv[i] * y, pk = pv[i] * ek;
            for (size_t j = 0; j < D; ++j) {
                o[i * D + j] = pe * qv[j];
                o[D * D + i * D + j] = pk * qv[j];
            }
        }
    };
    // same cancellation as in pairing_matrix
    PrecisionContext loose = ctx;
    loose.quad_rel_tol = std::max(ctx.quad_rel_tol, Real(pow10(-(ctx.digits / 2))));
    std::vector<Real> r = integrate_gauss_legendre(f, 2 * D * D, win, loose);

    std::vector<Real> gdown(D), gup(D);  // e^{-(j/2) l_j}, e^{(j/2) l_j} / h_j
    for (size_t j = 0; j < D; ++j) {
        const Real g = d.ell.empty() ? Real(0) : Real(Real(j) * d.ell[j] / 2);
        gdown[j] = exp(-g);
        gup[j] = exp(g) / sys.h[j];
    }
    for (size_t j = 0; j < D; ++j)
        for (size_t k = 0; k < D; ++k) {
            // a_{j,k} = \int p~_k q~_j e^x ; b_{j,k} = \int p~_j q~_k exp_k
            d.a_coeffs[{int(j), int(k)}] = gdown[k] * gup[j] * r[k * D + j];
            d.b_coeffs[{int(j), int(k)}] = gdown[j] * gup[k] * r[D * D + j * D + k];
        }
    for (int l = -1; l <= 4; ++l) d.alpha_limits[l] = alpha_limit(l, eq1);
    return d;
}

namespace {

Complex weight_half(const BiorthoSystem& sys, const Complex& z) {
    return exp(Real(-Real(sys.n) / 2) * horner(sys.V.coeffs(), z));
}

Complex sin_c(const Complex& z) {
    // (e^{iz} - e^{-iz}) / 2i
    Complex iz(-z.im, z.re);
    Complex w = exp(iz) - exp(-iz);
    return Complex(w.im / 2, -w.re / 2);
}

}  // namespace

Complex p_tilde(const BiorthoSystem& sys, const CDDiagnostics& d, int j, const Complex& z) {
    ScopedPrecision guard(sys.digits);
    const Real g = d.ell.empty() ? Real(0) : Real(Real(j) * d.ell[j] / 2);
    return Complex(exp(-g)) * weight_half(sys, z) * horner(sys.p[j], z);
}

Complex q_tilde(const BiorthoSystem& sys, const CDDiagnostics& d, int j, const Complex& z) {
    ScopedPrecision guard(sys.digits);
    const Real g = d.ell.empty() ? Real(0) : Real(Real(j) * d.ell[j] / 2);
    return Complex(exp(g) / sys.h[j]) * weight_half(sys, z) * horner(sys.q[j], exp(z));
}

CDDecomposition cd_decomposition(const BiorthoSystem& sys, CDDiagnostics& d, const Equilibrium& eq1,
                                 const Complex& u, const Complex& v, const PrecisionContext& ctx) {
    const int n = sys.n, kd = d.k_delta, M = d.M;
    if (d.n != n) throw ValidationError("cd_decomposition: diagnostics were built for another n");
    const PrecisionContext ce = PrecisionContext::with_digits(eq1.data.digits);
    const Complex Fu = F_function(eq1.data, eq1.table, u, ce), Fv = F_function(eq1.data, eq1.table, v, ce);
    ScopedPrecision guard(ctx.digits);
    const int top = cd_degrees_needed(n, d.delta, M);
    std::vector<Complex> P(top + 1), Q(top + 1);
    for (int j = 0; j <= top; ++j) {
        P[j] = p_tilde(sys, d, j, u);
        Q[j] = q_tilde(sys, d, j, v);
    }
    CDDecomposition out;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out.J1 += Complex(d.b(k, j) - d.a(j, k)) * P[j] * Q[k];
    for (int j = n - kd; j < n; ++j)
        for (int k = n; k <= j + kd; ++k) out.J2 += Complex(d.b(j, k)) * P[k] * Q[j];
    out.corner = Complex(d.a(n - 1, n)) * P[n - 1] * Q[n];
    Complex K;
    for (int k = 0; k < n; ++k) K += P[k] * Q[k];
    out.lhs = (exp_truncated(kd, u) - exp(v)) * K;
    out.residual = out.lhs - (out.J1 + out.J2 - out.corner);

    out.conj_factor = exp(Real(n) * (Fu - Fv));
    Complex main;
    for (int j = n - M; j < n; ++j)
        for (int k = n; k <= j + M; ++k) main += Complex(d.a(k, j)) * P[k] * Q[j];
    out.main_term = out.conj_factor * (main - out.corner);
    out.J1_conj = out.conj_factor * out.J1;
    out.J2_conj = out.conj_factor * out.J2;
    d.J1_value = out.J1;
    d.J2_value = out.J2;
    return out;
}

Complex bulk_point(const Equilibrium& eq1, const Real& x_star, const Complex& xi, int n,
                   const PrecisionContext& ctx, BulkScaling scaling) {
    if (!(x_star > eq1.data.a && x_star < eq1.data.b))
        throw OutsideBulk("bulk_point: x* = " + to_decimal(x_star, 10) + " is not inside the support");
    ScopedPrecision guard(ctx.digits);
    Real s = eq1.table.psi(x_star) * n;
    if (scaling == BulkScaling::literal) s *= pi();
    return Complex(x_star) + xi / s;
}

Complex main_term_target(const Real& x_star, const Complex& xi, const Complex& eta) {
    return Complex(exp(x_star) / pi()) * sin_c(Complex(pi()) * (xi - eta));
}

}  // namespace xs
