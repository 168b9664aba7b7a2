#include "xs/airy.hpp"

#include <cmath>

namespace xs {

using boost::multiprecision::abs;

AiryValue airy(const Real& x_in, const PrecisionContext& ctx) {
    const double ax = std::abs(static_cast<double>(x_in));
    const int extra = static_cast<int>(std::ceil(4.0 / 3.0 * std::pow(ax, 1.5) / std::log(10.0))) + 10;
    const int wd = ctx.digits + extra;
    AiryValue out;
    {
        ScopedPrecision guard(wd);
        const Real x = with_digits(x_in, wd);
        const Real x3 = x * x * x;
        const Real eps = pow10(-wd);
        // f = sum a_k x^{3k}, g = sum b_k x^{3k+1}
        Real a = 1, b = 1, p = x * x;  // p = x^{3k-1}
        Real f = 1, g = x, fp = 0, gp = 1;
        Real big = 1;
        for (int k = 1;; ++k) {
            a /= (3 * k - 1) * (3 * k);
            b /= (3 * k) * (3 * k + 1);
            const Real tfp = 3 * k * a * p;
            const Real tf = a * p * x;
            const Real tgp = (3 * k + 1) * b * p * x;
            const Real tg = b * p * x * x;
            f += tf;
            fp += tfp;
            g += tg;
            gp += tgp;
            p *= x3;
            Real m = abs(tf) + abs(tg) + abs(tfp) + abs(tgp);
            if (m > big) big = m;
            if (k > 2 && m <= eps * big) break;
        }
        const Real c1 = boost::multiprecision::pow(Real(3), Real(-2) / 3) / boost::multiprecision::tgamma(Real(2) / 3);
        const Real c2 = boost::multiprecision::pow(Real(3), Real(-1) / 3) / boost::multiprecision::tgamma(Real(1) / 3);
        out.ai = c1 * f - c2 * g;
        out.aip = c1 * fp - c2 * gp;
    }
    ScopedPrecision guard(ctx.digits);
    return AiryValue{with_digits(out.ai, ctx.digits), with_digits(out.aip, ctx.digits)};
}

Real airy_kernel(const Real& x, const Real& y, const PrecisionContext& ctx) {
    ScopedPrecision guard(ctx.digits);
    AiryValue ax = airy(x, ctx);
    if (x == y) return ax.aip * ax.aip - x * ax.ai * ax.ai;
    AiryValue ay = airy(y, ctx);
    return (ax.ai * ay.aip - ax.aip * ay.ai) / (x - y);
}

}  // namespace xs
