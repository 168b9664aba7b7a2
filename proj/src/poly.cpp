#include "xs/poly.hpp"

#include "xs/errors.hpp"

#include <cmath>

namespace xs {

using boost::multiprecision::abs;

Real horner(const std::vector<Real>& c, const Real& x) {
    Real r = 0;
    for (size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

Complex horner(const std::vector<Real>& c, const Complex& z) {
    Complex r(0);
    for (size_t i = c.size(); i-- > 0;) r = r * z + Complex(c[i]);
    return r;
}

std::pair<Real, Real> horner2(const std::vector<Real>& c, const Real& x) {
    Real p = 0, d = 0;
    for (size_t i = c.size(); i-- > 0;) {
        d = d * x + p;
        p = p * x + c[i];
    }
    return {p, d};
}

namespace {

Real cauchy_bound(const std::vector<Real>& c) {
    Real m = 0;
    const Real& lead = c.back();
    for (size_t i = 0; i + 1 < c.size(); ++i) m = std::max(m, Real(abs(c[i] / lead)));
    return 1 + m;
}

int sign(const Real& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

Real bracketed_root(const std::vector<Real>& c, Real lo, Real hi, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const Real eps = pow10(-(ctx.digits - 2));
    int slo = sign(horner(c, lo));
    if (slo == 0) return lo;
    if (sign(horner(c, hi)) == 0) return hi;
    Real x = (lo + hi) / 2;
    const int max_it = 4 * ctx.digits + 100;
    for (int it = 0; it < max_it; ++it) {
        auto [p, d] = horner2(c, x);
        int s = sign(p);
        if (s == 0) return x;
        if (s == slo) lo = x;
        else hi = x;
        if (hi - lo <= eps * (1 + abs(x))) return (lo + hi) / 2;
        Real xn = (d != 0) ? Real(x - p / d) : Real((lo + hi) / 2);
        // fall back to bisection when Newton leaves the bracket
        if (!(xn > lo && xn < hi)) xn = (lo + hi) / 2;
        if (abs(xn - x) <= eps * (1 + abs(x))) return xn;
        x = xn;
    }
    return x;
}

std::optional<std::vector<Real>> roots_between(const std::vector<Real>& c, const std::vector<Real>& separators,
                                               const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const Real bound = cauchy_bound(c);
    std::vector<Real> edges;
    edges.push_back(-bound);
    for (const auto& s : separators) edges.push_back(s);
    edges.push_back(bound);
    std::vector<Real> roots;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        const Real& lo = edges[i];
        const Real& hi = edges[i + 1];
        int a = sign(horner(c, lo)), b = sign(horner(c, hi));
        if (a == 0 || b == 0 || a == b) return std::nullopt;
        roots.push_back(bracketed_root(c, lo, hi, ctx));
    }
    return roots;
}

std::vector<Complex> aberth_roots(const std::vector<Real>& c, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const size_t n = c.size() - 1;
    std::vector<Complex> z(n);
    if (n == 0) return z;
    std::vector<Real> dc(n);
    for (size_t i = 1; i <= n; ++i) dc[i - 1] = c[i] * Real(i);
    const Real r = cauchy_bound(c) / 2;
    const Real twopi = 2 * pi();
    for (size_t i = 0; i < n; ++i) {
        Real th = twopi * i / n + Real(0.4);
        z[i] = Complex(r * cos(th), r * sin(th));
    }
    const Real eps = pow10(-(ctx.digits - 4));
    for (int it = 0; it < 50 * ctx.digits + 500; ++it) {
        bool done = true;
        for (size_t i = 0; i < n; ++i) {
            Complex p = horner(c, z[i]);
            if (abs(p) == 0) continue;
            Complex w = p / horner(dc, z[i]);
            Complex s(0);
            for (size_t j = 0; j < n; ++j)
                if (j != i) s += Complex(1) / (z[i] - z[j]);
            Complex step = w / (Complex(1) - w * s);
            z[i] -= step;
            if (abs(step) > eps * (1 + abs(z[i]))) done = false;
        }
        if (done) return z;
    }
    throw NonConvergent("aberth: roots did not settle");
}

std::vector<Real> Chebyshev::nodes(const Real& a, const Real& b, int count) {
    std::vector<Real> x(count);
    const Real mid = (a + b) / 2, half = (b - a) / 2;
    const Real p = pi();
    for (int k = 0; k < count; ++k) x[k] = mid + half * cos(p * (2 * k + 1) / (2 * count));
    return x;
}

Chebyshev::Chebyshev(const Real& a, const Real& b, const std::vector<Real>& f) : a_(a), b_(b) {
    const int n = static_cast<int>(f.size());
    // cos(pi j (2k+1) / 2n) only takes 4n distinct values
    std::vector<Real> tab(4 * n);
    const Real p = pi();
    for (int m = 0; m < 4 * n; ++m) tab[m] = cos(p * m / (2 * n));
    coef_.assign(n, Real(0));
    for (int j = 0; j < n; ++j) {
        Real s = 0;
        for (int k = 0; k < n; ++k) s += f[k] * tab[(static_cast<long>(j) * (2 * k + 1)) % (4 * n)];
        coef_[j] = 2 * s / n;
    }
    coef_[0] /= 2;
}

void Chebyshev::trim(const Real& tol) {
    Real m = 0;
    for (const auto& c : coef_) m = std::max(m, Real(abs(c)));
    size_t keep = coef_.size();
    while (keep > 1 && abs(coef_[keep - 1]) <= tol * m) --keep;
    coef_.resize(keep);
}

Real Chebyshev::operator()(const Real& x) const {
    const Real t = (2 * x - a_ - b_) / (b_ - a_);
    Real b1 = 0, b2 = 0;
    for (size_t j = coef_.size(); j-- > 1;) {
        Real b0 = 2 * t * b1 - b2 + coef_[j];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + coef_[0];
}

}  // namespace xs
