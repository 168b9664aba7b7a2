#include "xs/real.hpp"

#include "xs/errors.hpp"

#include <mpfr.h>

#include <cmath>
#include <memory>

namespace xs {

PrecisionContext PrecisionContext::with_digits(int digits) {
    PrecisionContext c;
    c.digits = digits;
    ScopedPrecision guard(std::max(digits, 32));
    c.quad_rel_tol = pow10(-(digits - 8));
    c.newton_tol = pow10(-(digits - 14));
    return c;
}

void PrecisionContext::validate() const {
    if (digits < 32)
        throw ValidationError("precision: digits must be >= 32 (got " + std::to_string(digits) + ")");
    if (quad_rel_tol <= 0 || newton_tol <= 0)
        throw ValidationError("precision: tolerances must be positive");
    if (quad_rel_tol * pow10(digits - 8) < Real(0.999))
        throw ValidationError("precision: quad_rel_tol tighter than 10^-(digits-8)");
    if (max_panel_doublings < 1 || newton_max_iter < 1)
        throw ValidationError("precision: iteration limits must be positive");
}

ScopedPrecision::ScopedPrecision(int digits) : old_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(digits));
}

ScopedPrecision::~ScopedPrecision() { Real::default_precision(old_); }

Real pow10(long e) {
    Real r;
    mpfr_ui_pow_ui(r.backend().data(), 10, static_cast<unsigned long>(e < 0 ? -e : e), MPFR_RNDN);
    if (e < 0) r = 1 / r;
    return r;
}

Real pi() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

Real ln2() {
    Real r;
    mpfr_const_log2(r.backend().data(), MPFR_RNDN);
    return r;
}

Real with_digits(const Real& x, int digits) { return Real(x, static_cast<unsigned>(digits)); }

int digits_of(const Real& x) {
    return static_cast<int>(std::floor(mpfr_get_prec(x.backend().data()) * 0.30102999566398120));
}

std::string to_decimal(const Real& x) {
    const mpfr_srcptr p = x.backend().data();
    if (mpfr_zero_p(p)) return "0";
    if (!mpfr_number_p(p)) throw ValidationError("to_decimal: non-finite value");
    // enough digits that parsing at the same precision restores every bit
    const size_t nd = mpfr_get_str_ndigits(10, mpfr_get_prec(p));
    mpfr_exp_t e = 0;
    std::unique_ptr<char, void (*)(char*)> s(mpfr_get_str(nullptr, &e, 10, nd, p, MPFR_RNDN), mpfr_free_str);
    std::string m(s.get());
    std::string sign;
    if (m[0] == '-') {
        sign = "-";
        m.erase(0, 1);
    }
    while (m.size() > 1 && m.back() == '0') m.pop_back();
    std::string out = sign + m.substr(0, 1);
    if (m.size() > 1) out += "." + m.substr(1);
    if (e - 1 != 0) out += "e" + std::to_string(static_cast<long>(e - 1));
    return out;
}

std::string to_decimal(const Real& x, int significant) {
    return x.str(significant, std::ios_base::scientific);
}

Real from_decimal(const std::string& s, int digits) {
    Real r(0, static_cast<unsigned>(digits));
    if (s.empty() || mpfr_set_str(r.backend().data(), s.c_str(), 10, MPFR_RNDN) != 0)
        throw ValidationError("not a decimal number: '" + s + "'");
    return r;
}

Complex& Complex::operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
}

Complex& Complex::operator/=(const Complex& o) {
    *this = *this / o;
    return *this;
}

Complex operator+(const Complex& a, const Complex& b) { return Complex(a.re + b.re, a.im + b.im); }
Complex operator-(const Complex& a, const Complex& b) { return Complex(a.re - b.re, a.im - b.im); }
Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
Complex operator*(const Complex& a, const Complex& b) {
    return Complex(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}
Complex operator*(const Real& a, const Complex& b) { return Complex(a * b.re, a * b.im); }
Complex operator*(const Complex& a, const Real& b) { return Complex(a.re * b, a.im * b); }

Complex operator/(const Complex& a, const Complex& b) {
    // Smith's scaling keeps the intermediate magnitudes sane
    using boost::multiprecision::abs;
    if (abs(b.re) >= abs(b.im)) {
        Real r = b.im / b.re;
        Real d = b.re + b.im * r;
        return Complex((a.re + a.im * r) / d, (a.im - a.re * r) / d);
    }
    Real r = b.re / b.im;
    Real d = b.re * r + b.im;
    return Complex((a.re * r + a.im) / d, (a.im * r - a.re) / d);
}

Complex operator/(const Complex& a, const Real& b) { return Complex(a.re / b, a.im / b); }

Complex conj(const Complex& z) { return Complex(z.re, -z.im); }

Real abs(const Complex& z) {
    Real r;
    mpfr_hypot(r.backend().data(), z.re.backend().data(), z.im.backend().data(), MPFR_RNDN);
    return r;
}

Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Real arg(const Complex& z) {
    Real r;
    mpfr_atan2(r.backend().data(), z.im.backend().data(), z.re.backend().data(), MPFR_RNDN);
    return r;
}

Complex exp(const Complex& z) {
    Real m = boost::multiprecision::exp(z.re);
    return Complex(m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im));
}

Complex log(const Complex& z) { return Complex(boost::multiprecision::log(abs(z)), arg(z)); }

Complex sqrt(const Complex& z) {
    Real r = abs(z);
    if (r == 0) return Complex(0);
    Real s = boost::multiprecision::sqrt((r + boost::multiprecision::abs(z.re)) / 2);
    if (z.re >= 0) return Complex(s, z.im / (2 * s));
    Real t = boost::multiprecision::abs(z.im) / (2 * s);
    return Complex(t, z.im < 0 ? Real(-s) : s);
}

Complex exprel(const Complex& w) {
    if (abs(w) > Real(0.5)) return (exp(w) - Complex(1)) / w;
    // series sum_k w^k/(k+1)!
    const Real eps = pow10(-static_cast<long>(digits_of(w.re) + 4));
    Complex term(1), sum(1);
    for (int k = 1; k < 100000; ++k) {
        term = term * w / Real(k + 1);
        sum += term;
        if (abs(term) < eps) break;
    }
    return sum;
}

Real exprel(const Real& w) {
    if (w == 0) return Real(1);
    return boost::multiprecision::expm1(w) / w;
}

}  // namespace xs
