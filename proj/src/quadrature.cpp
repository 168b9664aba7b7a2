#include "xs/quadrature.hpp"

#include "xs/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace xs {

using boost::multiprecision::abs;

RealInterval::RealInterval(const Real& lo_, const Real& hi_) : lo(lo_), hi(hi_) {
    if (!(lo < hi)) throw ValidationError("interval: lo must be < hi");
}

namespace {

bool agree(const Real& prev, const Real& cur, const Real& tol) { return abs(cur - prev) <= tol * (1 + abs(cur)); }

bool agree(const std::vector<Real>& prev, const std::vector<Real>& cur, const Real& tol) {
    for (size_t k = 0; k < cur.size(); ++k)
        if (!agree(prev[k], cur[k], tol)) return false;
    return true;
}

GaussRule compute_rule(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    const Real eps = pow10(-static_cast<long>(Real::default_precision()) + 2);
    const Real one(1);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        Real x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        Real dp;
        for (int it = 0; it < 100; ++it) {
            // P_n(x) and P_n'(x) by the three-term recurrence
            Real p0 = one, p1 = x;
            for (int k = 2; k <= n; ++k) {
                Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            Real dx = p1 / dp;
            x -= dx;
            if (abs(dx) < eps) break;
        }
        {
            Real p0 = one, p1 = x;
            for (int k = 2; k <= n; ++k) {
                Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
        }
        Real w = 2 / ((1 - x * x) * dp * dp);
        r.x[i] = -x;
        r.w[i] = w;
        r.x[n - 1 - i] = x;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0;
    return r;
}

// one composite Gauss level with `panels` equal panels
template <class Acc>
void gauss_level(const RealInterval& iv, long panels, const GaussRule& rule, Acc&& acc) {
    const Real h = (iv.hi - iv.lo) / panels;
    const Real half = h / 2;
    for (long p = 0; p < panels; ++p) {
        const Real mid = iv.lo + h * p + half;
        for (size_t k = 0; k < rule.x.size(); ++k) acc(mid + half * rule.x[k], half * rule.w[k]);
    }
}

}  // namespace

int default_gauss_nodes(int digits) { return std::clamp(digits / 4 + 16, 24, 128); }

const GaussRule& gauss_legendre_rule(int nodes, int digits) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, GaussRule> cache;
    const auto key = std::make_pair(nodes, digits);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) {
        ScopedPrecision guard(digits);
        it = cache.emplace(key, compute_rule(nodes)).first;
    }
    return it->second;
}

Real integrate_gauss_legendre(const RealFn& f, const RealInterval& iv, const PrecisionContext& ctx) {
    std::vector<Real> out = integrate_gauss_legendre(
        [&](const Real& x, std::vector<Real>& o) { o[0] = f(x); }, 1, iv, ctx);
    return out[0];
}

std::vector<Real> integrate_gauss_legendre(const VecFn& f, size_t dim, const RealInterval& iv,
                                           const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const GaussRule& rule = gauss_legendre_rule(default_gauss_nodes(ctx.digits), ctx.digits);
    std::vector<Real> prev, cur(dim), val(dim);
    for (int level = 0; level <= ctx.max_panel_doublings; ++level) {
        for (auto& c : cur) c = 0;
        gauss_level(iv, 1L << level, rule, [&](const Real& x, const Real& w) {
            f(x, val);
            for (size_t k = 0; k < dim; ++k) cur[k] += w * val[k];
        });
        if (level > 0 && agree(prev, cur, ctx.quad_rel_tol)) return cur;
        prev = cur;
    }
    throw NonConvergent("gauss-legendre: no agreement after " + std::to_string(ctx.max_panel_doublings) +
                        " panel doublings");
}

std::vector<Real> integrate_tanh_sinh(const VecFn& f, size_t dim, const RealInterval& iv,
                                      const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const Real c = (iv.lo + iv.hi) / 2;
    const Real r = (iv.hi - iv.lo) / 2;
    const Real halfpi = pi() / 2;
    // stop once the node distance to the endpoint is below 10^-(2d+20) of the half width
    const Real dmin = pow10(-(2L * ctx.digits + 20));
    std::vector<Real> sum(dim, Real(0)), val(dim), prev;

    // adds the node pair at +-t; returns false once both sides are negligible
    auto add = [&](const Real& t, std::vector<Real>& acc) -> bool {
        const Real u = halfpi * sinh(t);
        const Real e = exp(-2 * u);
        const Real d = 2 * e / (1 + e);             // 1 - tanh(u), no cancellation
        const Real w = halfpi * cosh(t) * 4 * e / ((1 + e) * (1 + e));  // sech^2(u) pi/2 cosh t
        if (d < dmin) return false;
        const Real xr = iv.hi - r * d;
        const Real xl = iv.lo + r * d;
        bool any = false;
        if (xr < iv.hi) {
            f(xr, val);
            for (size_t k = 0; k < dim; ++k) acc[k] += w * val[k];
            any = true;
        }
        if (xl > iv.lo) {
            f(xl, val);
            for (size_t k = 0; k < dim; ++k) acc[k] += w * val[k];
            any = true;
        }
        return any;
    };

    // level 0: h = 1, t = 0, +-1, +-2, ...
    f(c, val);
    for (size_t k = 0; k < dim; ++k) sum[k] = halfpi * val[k];
    for (int j = 1;; ++j)
        if (!add(Real(j), sum)) break;
    Real h = 1;
    std::vector<Real> cur(dim);
    for (size_t k = 0; k < dim; ++k) cur[k] = h * r * sum[k];
    // h = 2^-12 already resolves anything analytic near the real segment; more levels
    // only chase noise at a quadratically growing cost
    const int max_level = std::min(ctx.max_panel_doublings, 12);
    for (int level = 1; level <= max_level; ++level) {
        prev = cur;
        h /= 2;
        for (long j = 1;; j += 2)
            if (!add(h * j, sum)) break;
        for (size_t k = 0; k < dim; ++k) cur[k] = h * r * sum[k];
        if (level >= 3 && agree(prev, cur, ctx.quad_rel_tol)) return cur;
    }
    throw NonConvergent("tanh-sinh: no agreement after " + std::to_string(max_level) + " levels");
}

Real integrate_tanh_sinh(const RealFn& f, const RealInterval& iv, const PrecisionContext& ctx) {
    return integrate_tanh_sinh([&](const Real& x, std::vector<Real>& o) { o[0] = f(x); }, 1, iv, ctx)[0];
}

Complex integrate_tanh_sinh_complex(const std::function<Complex(const Real&)>& f, const RealInterval& iv,
                            const PrecisionContext& ctx) {
    auto v = integrate_tanh_sinh(
        [&](const Real& x, std::vector<Real>& o) {
            Complex z = f(x);
            o[0] = z.re;
            o[1] = z.im;
        },
        2, iv, ctx);
    return Complex(v[0], v[1]);
}

std::vector<Complex> integrate_circle(const ComplexVecFn& g, size_t dim, const Real& radius,
                                      const PrecisionContext& ctx) {
    if (!(radius > Real(0.5))) throw ValidationError("integrate_circle: radius must exceed 1/2");
    ScopedPrecision guard(ctx.digits);
    const Real twopi = 2 * pi();
    std::vector<Complex> sum(dim), val(dim);
    auto add_node = [&](long k, long n) {
        const Real th = twopi * k / n;
        const Complex s(radius * cos(th), radius * sin(th));
        g(s, val);
        for (size_t i = 0; i < dim; ++i) sum[i] += val[i] * s;
    };
    long n = 32;
    for (long k = 0; k < n; ++k) add_node(k, n);
    std::vector<Complex> prev(dim), cur(dim);
    for (size_t i = 0; i < dim; ++i) cur[i] = sum[i] / Real(n);
    for (int level = 0; level <= ctx.max_panel_doublings; ++level) {
        prev = cur;
        for (long k = 1; k < 2 * n; k += 2) add_node(k, 2 * n);
        n *= 2;
        for (size_t i = 0; i < dim; ++i) cur[i] = sum[i] / Real(n);
        bool ok = true;
        for (size_t i = 0; i < dim && ok; ++i)
            ok = abs(cur[i] - prev[i]) <= ctx.quad_rel_tol * (1 + abs(cur[i]));
        if (ok) return cur;
    }
    throw NonConvergent("circle trapezoid: no agreement after " + std::to_string(ctx.max_panel_doublings) +
                        " doublings");
}

Complex integrate_circle(const ComplexFn& g, const Real& radius, const PrecisionContext& ctx) {
    return integrate_circle([&](const Complex& s, std::vector<Complex>& o) { o[0] = g(s); }, 1, radius, ctx)[0];
}

}  // namespace xs
