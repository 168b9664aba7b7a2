#include "xs/potential.hpp"

#include "xs/errors.hpp"
#include "xs/poly.hpp"

#include <cctype>

namespace xs {

using boost::multiprecision::abs;

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    boost::multiprecision::cpp_int mant = 0;
    long scale = 0;
    bool any = false, dot = false;
    for (; i < s.size(); ++i) {
        char ch = s[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            mant = mant * 10 + (ch - '0');
            any = true;
            if (dot) --scale;
        } else if (ch == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!any) throw ValidationError("not a decimal number: '" + text + "'");
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw ValidationError("not a decimal number: '" + text + "'");
        std::string ex = s.substr(i + 1);
        if (ex.empty()) throw ValidationError("not a decimal number: '" + text + "'");
        size_t pos = 0;
        long e = 0;
        try {
            e = std::stol(ex, &pos);
        } catch (const std::exception&) {
            throw ValidationError("not a decimal number: '" + text + "'");
        }
        if (pos != ex.size() || e > 100000 || e < -100000) throw ValidationError("not a decimal number: '" + text + "'");
        scale += e;
    }
    Rational q(mant);
    boost::multiprecision::cpp_int p10 = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                    static_cast<unsigned>(scale < 0 ? -scale : scale));
    q = scale < 0 ? q / Rational(p10) : q * Rational(p10);
    return neg ? Rational(-q) : q;
}

std::string rational_to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

Real to_real(const Rational& q) {
    Real num(numerator(q).str()), den(denominator(q).str());
    return num / den;
}

Potential Potential::make(std::vector<Rational> coeffs, int digits) {
    while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
    const int deg = static_cast<int>(coeffs.size()) - 1;
    if (deg < 2 || deg % 2 != 0)
        throw ValidationError("potential: degree must be even and >= 2 (got " + std::to_string(deg) + ")");
    if (coeffs.back() <= 0) throw ValidationError("potential: leading coefficient must be positive");

    Potential v;
    v.exact_ = std::move(coeffs);
    v.digits_ = digits;
    ScopedPrecision guard(digits);
    for (const auto& q : v.exact_) v.c_.push_back(to_real(q));
    for (int k = 1; k <= deg; ++k) v.c1_.push_back(v.c_[k] * k);
    for (int k = 2; k <= deg; ++k) v.c2_.push_back(v.c_[k] * (k * (k - 1)));

    // V'' has even degree and positive leading coefficient, so its minimum sits at a real root of V'''
    PrecisionContext ctx = PrecisionContext::with_digits(std::max(digits, 32));
    Real lo = horner(v.c2_, Real(0));
    if (deg >= 4) {
        std::vector<Real> c3;
        for (size_t k = 1; k < v.c2_.size(); ++k) c3.push_back(v.c2_[k] * Real(k));
        for (const Complex& z : aberth_roots(c3, ctx))
            if (abs(z.im) <= pow10(-(ctx.digits / 2)) * (1 + abs(z.re))) lo = std::min(lo, horner(v.c2_, z.re));
    }
    // plus a wide scan as a second opinion
    Real bound = 1;
    for (size_t k = 0; k + 1 < v.c2_.size(); ++k) bound = std::max(bound, Real(1 + abs(v.c2_[k] / v.c2_.back())));
    const int npts = 2001;
    for (int i = 0; i < npts; ++i) {
        Real x = -2 * bound + 4 * bound * i / (npts - 1);
        lo = std::min(lo, horner(v.c2_, x));
    }
    if (!(lo > 0))
        throw ValidationError("potential: not strongly convex, V'' must stay above a positive constant (min V'' = " +
                              to_decimal(lo, 6) + ")");
    v.floor_ = lo * (1 - pow10(-10));
    return v;
}

Potential Potential::from_decimal(const std::vector<std::string>& coeffs, int digits) {
    std::vector<Rational> q;
    for (const auto& s : coeffs) q.push_back(parse_rational(s));
    return make(std::move(q), digits);
}

std::string Potential::key() const {
    std::string k = "[";
    for (size_t i = 0; i < exact_.size(); ++i) k += (i ? "," : "") + rational_to_string(exact_[i]);
    return k + "]";
}

Real Potential::value(const Real& x) const { return horner(c_, x); }
Real Potential::d1(const Real& x) const { return horner(c1_, x); }
Real Potential::d2(const Real& x) const { return horner(c2_, x); }
Complex Potential::d1(const Complex& z) const { return horner(c1_, z); }
Complex Potential::d2(const Complex& z) const { return horner(c2_, z); }

Real Potential::tilted_argmin(const Real& slope) const {
    ScopedPrecision guard(digits_);
    std::vector<Real> c = c1_;
    c[0] -= slope;
    Real lo = -1, hi = 1;
    while (horner(c, lo) > 0) lo *= 2;
    while (horner(c, hi) < 0) hi *= 2;
    return bracketed_root(c, lo, hi, PrecisionContext::with_digits(std::max(digits_, 32)));
}

Potential reflect_potential(const Potential& v, const Rational& lin) {
    std::vector<Rational> c = v.exact();
    for (size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
    c[1] += lin;
    return Potential::make(std::move(c), v.digits());
}

Potential reflect_potential(const Potential& v, int n) {
    if (n < 1) throw ValidationError("reflect_potential: n must be positive");
    return reflect_potential(v, Rational(n - 1, n));
}

}  // namespace xs
