#include "xs/solve.hpp"

#include "xs/errors.hpp"

namespace xs {

using boost::multiprecision::abs;

namespace {

Real inf_norm(const std::vector<Real>& v) {
    Real m = 0;
    for (const auto& x : v)
        if (abs(x) > m) m = abs(x);
    return m;
}

}  // namespace

std::vector<Real> newton_solve(const VecMap& f, const JacMap& jac, std::vector<Real> x,
                               const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    std::vector<Real> fx = f(x);
    Real res = inf_norm(fx);
    for (int it = 0; it < ctx.newton_max_iter; ++it) {
        if (res <= ctx.newton_tol) return x;
        std::vector<Real> rhs(fx.size());
        for (size_t i = 0; i < fx.size(); ++i) rhs[i] = -fx[i];
        std::vector<Real> dx = solve_linear(jac(x), rhs);
        Real lambda = 1;
        std::vector<Real> xn(x.size()), fn;
        Real rn;
        for (int half = 0;; ++half) {
            for (size_t i = 0; i < x.size(); ++i) xn[i] = x[i] + lambda * dx[i];
            fn = f(xn);
            rn = inf_norm(fn);
            if (rn < res || half == 6) break;
            lambda /= 2;
        }
        x = xn;
        fx = fn;
        res = rn;
    }
    if (res <= ctx.newton_tol) return x;
    throw NonConvergent("newton: residual " + to_decimal(res, 6) + " after " + std::to_string(ctx.newton_max_iter) +
                        " iterations");
}

Complex complex_newton(const ComplexMap& f, const ComplexMap& df, Complex z, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    Complex fz = f(z);
    for (int it = 0; it < ctx.newton_max_iter; ++it) {
        if (abs(fz) <= ctx.newton_tol) return z;
        Complex d = df(z);
        if (abs(d) == 0) throw SingularJacobian("complex newton: zero derivative");
        z -= fz / d;
        fz = f(z);
    }
    if (abs(fz) <= ctx.newton_tol) return z;
    throw NonConvergent("complex newton: residual " + to_decimal(abs(fz), 6) + " after " +
                        std::to_string(ctx.newton_max_iter) + " iterations");
}

Complex complex_newton(const ComplexMap& f, Complex z0, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    const Real h = pow10(-(ctx.digits / 3));
    auto df = [&](const Complex& z) {
        Complex step(h * (1 + abs(z)));
        return (f(z + step) - f(z - step)) / (Real(2) * step.re);
    };
    return complex_newton(f, df, z0, ctx);
}

}  // namespace xs
